#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <thread>

#include "evstream/glob.hpp"
#include "evstream/pubsub.hpp"

using namespace evstream;

TEST_CASE("pubsub: subscribe then publish delivers; no replay for late subscribers") {
  Hub hub;
  auto sub = hub.add_subscriber();

  REQUIRE(hub.publish("news", "before").ok());  // nobody listening yet

  auto ack = hub.subscribe(sub, "news");
  REQUIRE(ack.ok());
  REQUIRE(ack.value().size() == 1);
  CHECK(ack.value()[0].channel == "news");
  CHECK(ack.value()[0].next_seq == 2);

  auto pub = hub.publish("news", "after");
  REQUIRE(pub.ok());
  CHECK(pub.value().seq == 2);
  CHECK(pub.value().delivered == 1);

  EventPtr ev;
  REQUIRE(hub.pop(sub, ev));
  CHECK(ev->payload == "after");
  CHECK(ev->seq == 2);
  CHECK_FALSE(hub.pop(sub, ev));  // the earlier event was never queued
}

TEST_CASE("pubsub: glob pattern subscription matches channels") {
  Hub hub;
  auto sub = hub.add_subscriber();
  REQUIRE(hub.subscribe(sub, "sco?es").ok());
  auto pub = hub.publish("scores", "x");
  REQUIRE(pub.ok());
  CHECK(pub.value().delivered == 1);
  CHECK(hub.subscribe(sub, "").status() == Status::InvalidGlob);
}

TEST_CASE("pubsub: overlapping patterns deduplicate to one delivery") {
  Hub hub;
  auto sub = hub.add_subscriber();
  REQUIRE(hub.subscribe(sub, "a*").ok());
  REQUIRE(hub.subscribe(sub, "ab*").ok());

  auto pub = hub.publish("abc", "x");
  REQUIRE(pub.ok());
  CHECK(pub.value().delivered == 1);
  EventPtr ev;
  REQUIRE(hub.pop(sub, ev));
  CHECK_FALSE(hub.pop(sub, ev));

  // Removing one overlapping pattern still leaves one delivery per event.
  REQUIRE(hub.unsubscribe(sub, "ab*").ok());
  REQUIRE(hub.publish("abc", "y").ok());
  REQUIRE(hub.pop(sub, ev));
  CHECK(ev->payload == "y");
  CHECK_FALSE(hub.pop(sub, ev));
}

TEST_CASE("pubsub: unsubscribe stops delivery; unknown patterns rejected") {
  Hub hub;
  auto sub = hub.add_subscriber();
  REQUIRE(hub.subscribe(sub, "c").ok());
  REQUIRE(hub.unsubscribe(sub, "c").ok());
  CHECK(hub.unsubscribe(sub, "never-added").status() == Status::UnknownSubscription);

  auto pub = hub.publish("c", "x");
  REQUIRE(pub.ok());
  CHECK(pub.value().delivered == 0);
  CHECK(hub.pending(sub) == 0);
}

TEST_CASE("pubsub: publish without subscribers succeeds, seq gapless") {
  Hub hub;
  auto p1 = hub.publish("ch", "a");
  auto p2 = hub.publish("ch", "b");
  REQUIRE(p1.ok());
  REQUIRE(p2.ok());
  CHECK(p1.value().seq == 1);
  CHECK(p2.value().seq == 2);
  CHECK(p1.value().delivered == 0);
  CHECK(hub.publish("", "x").status() == Status::InvalidChannelName);
  CHECK(hub.publish(std::string(129, 'c'), "x").status() == Status::InvalidChannelName);
}

TEST_CASE("pubsub: delivered equals distinct matching subscribers (brute force)") {
  std::mt19937_64 rng(550123);
  Hub hub;
  struct Sub {
    SubscriberId id;
    std::set<std::string> patterns;
  };
  std::vector<Sub> subs;
  const std::vector<std::string> patterns = {"a*", "ab", "a?", "*", "b*", "ab*"};
  for (int i = 0; i < 12; ++i) {
    Sub s{hub.add_subscriber(), {}};
    const size_t n = 1 + rng() % 3;
    for (size_t k = 0; k < n; ++k) {
      const auto& p = patterns[rng() % patterns.size()];
      REQUIRE(hub.subscribe(s.id, p).ok());
      s.patterns.insert(p);
    }
    subs.push_back(std::move(s));
  }

  auto naive = [&](std::string_view channel) {
    uint64_t count = 0;
    for (const auto& s : subs) {
      for (const auto& p : s.patterns) {
        if (glob_match(p, channel)) {
          ++count;
          break;
        }
      }
    }
    return count;
  };

  for (const char* ch : {"a", "ab", "abc", "b", "bb", "xyz"}) {
    auto pub = hub.publish(ch, "x");
    REQUIRE(pub.ok());
    REQUIRE(pub.value().delivered == naive(ch));
  }
}

TEST_CASE("pubsub: per-subscriber FIFO under concurrent publishers") {
  Hub hub;
  auto sub = hub.add_subscriber();
  REQUIRE(hub.subscribe(sub, "ch*").ok());

  constexpr int kPublishers = 4;
  constexpr int kPerPublisher = 3000;
  std::vector<std::thread> pubs;
  for (int p = 0; p < kPublishers; ++p) {
    pubs.emplace_back([&, p] {
      const std::string channel = "ch" + std::to_string(p);
      for (int i = 0; i < kPerPublisher; ++i) {
        CHECK(hub.publish(channel, "x").ok());  // CHECK: REQUIRE throws across threads
      }
    });
  }

  std::map<std::string, uint64_t> last_seq;
  uint64_t received = 0;
  std::map<std::string, uint64_t> last_ts;
  while (received < kPublishers * kPerPublisher) {
    EventPtr ev;
    if (!hub.pop(sub, ev)) {
      std::this_thread::yield();
      continue;
    }
    ++received;
    // FIFO per channel: gapless ascending seq, non-decreasing publish_ts.
    REQUIRE(ev->seq == last_seq[ev->channel] + 1);
    last_seq[ev->channel] = ev->seq;
    REQUIRE(ev->publish_ts_ns >= last_ts[ev->channel]);
    last_ts[ev->channel] = ev->publish_ts_ns;
  }
  for (auto& t : pubs) t.join();
  CHECK(received == kPublishers * kPerPublisher);
}

TEST_CASE("pubsub: bounded queue overflow disconnects the slow subscriber") {
  Hub hub(8);
  auto slow = hub.add_subscriber();
  auto healthy = hub.add_subscriber();
  REQUIRE(hub.subscribe(slow, "ch").ok());
  REQUIRE(hub.subscribe(healthy, "ch").ok());

  for (int i = 0; i < 8; ++i) {
    auto pub = hub.publish("ch", "x");
    REQUIRE(pub.ok());
    CHECK(pub.value().delivered == 2);
  }
  CHECK_FALSE(hub.overflowed(slow));

  // Ninth event overflows the slow queue; the healthy subscriber keeps going.
  auto pub = hub.publish("ch", "x");
  REQUIRE(pub.ok());
  CHECK(pub.value().delivered == 1);
  CHECK(hub.overflowed(slow));
  CHECK(hub.pending(slow) == 0);  // queue dropped

  EventPtr ev;
  for (int i = 0; i < 9; ++i) REQUIRE(hub.pop(healthy, ev));

  // A disconnected subscriber gets nothing further.
  REQUIRE(hub.publish("ch", "x").ok());
  CHECK(hub.pending(slow) == 0);

  hub.remove_subscriber(slow);
  REQUIRE(hub.publish("ch", "x").ok());
  CHECK_FALSE(hub.pop(slow, ev));
}

TEST_CASE("pubsub: clean disconnect means zero further deliveries") {
  Hub hub;
  auto sub = hub.add_subscriber();
  REQUIRE(hub.subscribe(sub, "ch").ok());
  REQUIRE(hub.publish("ch", "x").ok());
  hub.remove_subscriber(sub);
  auto pub = hub.publish("ch", "y");
  REQUIRE(pub.ok());
  CHECK(pub.value().delivered == 0);
  EventPtr ev;
  CHECK_FALSE(hub.pop(sub, ev));
}
