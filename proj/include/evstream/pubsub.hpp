#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evstream/status.hpp"
#include "evstream/types.hpp"

namespace evstream {

using SubscriberId = uint64_t;
using EventPtr = std::shared_ptr<const Event>;

struct ChannelStart {
  std::string channel;
  uint64_t next_seq = 1;  // first sequence number the subscriber is entitled to
};

struct PublishResult {
  uint64_t seq = 0;
  uint64_t delivered = 0;  // distinct subscribers the event was queued for
  uint64_t publish_ts_ns = 0;
};

// Channel management and fan-out. Sequence assignment per channel is atomic
// and totally ordered (one lock spans assignment and enqueue, so a
// subscriber can never observe seq k+1 before k). Each subscriber owns a
// bounded FIFO queue; overflowing it disconnects the subscriber.
//
// Thread-safe: publishers and subscription changes may come from any
// thread. Each subscriber's queue expects a single consumer.
class Hub {
 public:
  explicit Hub(size_t max_queue_events = kDefaultQueueEvents);

  static constexpr size_t kDefaultQueueEvents = 65536;

  SubscriberId add_subscriber();
  void remove_subscriber(SubscriberId id);

  // Ack lists currently existing channels that match, with the next
  // sequence number on each; later-created channels are covered from their
  // first event. No replay: events published before the ack are not seen.
  Result<std::vector<ChannelStart>> subscribe(SubscriberId id, std::string_view pattern);

  // Removes one previously added pattern. Other patterns of the same
  // subscriber keep delivering (at most once per event regardless of how
  // many patterns match).
  Result<void> unsubscribe(SubscriberId id, std::string_view pattern);

  Result<PublishResult> publish(std::string_view channel, std::string_view payload);

  // Consume the oldest pending event; false when the queue is empty or the
  // subscriber is gone.
  bool pop(SubscriberId id, EventPtr& out);

  size_t pending(SubscriberId id) const;
  bool overflowed(SubscriberId id) const;
  uint64_t channel_seq(std::string_view channel) const;

 private:
  struct Subscriber {
    std::set<std::string> patterns;
    std::deque<EventPtr> queue;
    bool overflowed = false;
  };

  struct Channel {
    uint64_t next_seq = 1;
    uint64_t last_ts_ns = 0;
  };

  bool matches_any_locked(const Subscriber& sub, std::string_view channel) const;

  const size_t max_queue_events_;
  mutable std::mutex mu_;
  std::map<std::string, Channel, std::less<>> channels_;
  std::map<SubscriberId, Subscriber> subscribers_;
  SubscriberId next_subscriber_ = 1;
};

}  // namespace evstream
