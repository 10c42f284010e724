#include "evstream/pubsub.hpp"

#include <algorithm>

#include "evstream/clock.hpp"
#include "evstream/glob.hpp"

namespace evstream {

Hub::Hub(size_t max_queue_events) : max_queue_events_(max_queue_events) {}

SubscriberId Hub::add_subscriber() {
  std::lock_guard lock(mu_);
  SubscriberId id = next_subscriber_++;
  subscribers_.emplace(id, Subscriber{});
  return id;
}

void Hub::remove_subscriber(SubscriberId id) {
  std::lock_guard lock(mu_);
  subscribers_.erase(id);
}

Result<std::vector<ChannelStart>> Hub::subscribe(SubscriberId id, std::string_view pattern) {
  if (!glob_valid(pattern)) return Status::InvalidGlob;
  std::lock_guard lock(mu_);
  auto it = subscribers_.find(id);
  if (it == subscribers_.end()) return Status::UnknownSubscription;
  it->second.patterns.insert(std::string(pattern));

  std::vector<ChannelStart> starts;
  for (const auto& [name, ch] : channels_) {
    if (glob_match(pattern, name)) starts.push_back({name, ch.next_seq});
  }
  return starts;
}

Result<void> Hub::unsubscribe(SubscriberId id, std::string_view pattern) {
  std::lock_guard lock(mu_);
  auto it = subscribers_.find(id);
  if (it == subscribers_.end()) return Status::UnknownSubscription;
  auto pit = it->second.patterns.find(std::string(pattern));
  if (pit == it->second.patterns.end()) return Status::UnknownSubscription;
  it->second.patterns.erase(pit);
  return {};
}

bool Hub::matches_any_locked(const Subscriber& sub, std::string_view channel) const {
  return std::any_of(sub.patterns.begin(), sub.patterns.end(),
                     [&](const std::string& p) { return glob_match(p, channel); });
}

Result<PublishResult> Hub::publish(std::string_view channel, std::string_view payload) {
  if (!channel_name_valid(channel)) return Status::InvalidChannelName;
  if (payload.size() > kMaxEventPayloadBytes) return Status::ValueTooLarge;

  std::lock_guard lock(mu_);
  auto [cit, inserted] = channels_.try_emplace(std::string(channel));
  Channel& ch = cit->second;

  auto ev = std::make_shared<Event>();
  ev->channel.assign(channel);
  ev->seq = ch.next_seq++;
  // Serialized under the hub lock, so publish_ts never decreases in seq.
  ev->publish_ts_ns = std::max(monotonic_ns(), ch.last_ts_ns);
  ch.last_ts_ns = ev->publish_ts_ns;
  ev->payload.assign(payload);

  EventPtr shared = std::move(ev);
  uint64_t delivered = 0;
  for (auto& [id, sub] : subscribers_) {
    if (sub.overflowed || !matches_any_locked(sub, channel)) continue;
    if (sub.queue.size() >= max_queue_events_) {
      // Slow subscriber: drop it rather than degrade everyone else.
      sub.overflowed = true;
      sub.queue.clear();
      sub.patterns.clear();
      continue;
    }
    sub.queue.push_back(shared);
    ++delivered;
  }
  return PublishResult{shared->seq, delivered, shared->publish_ts_ns};
}

bool Hub::pop(SubscriberId id, EventPtr& out) {
  std::lock_guard lock(mu_);
  auto it = subscribers_.find(id);
  if (it == subscribers_.end() || it->second.queue.empty()) return false;
  out = std::move(it->second.queue.front());
  it->second.queue.pop_front();
  return true;
}

size_t Hub::pending(SubscriberId id) const {
  std::lock_guard lock(mu_);
  auto it = subscribers_.find(id);
  return it == subscribers_.end() ? 0 : it->second.queue.size();
}

bool Hub::overflowed(SubscriberId id) const {
  std::lock_guard lock(mu_);
  auto it = subscribers_.find(id);
  return it != subscribers_.end() && it->second.overflowed;
}

uint64_t Hub::channel_seq(std::string_view channel) const {
  std::lock_guard lock(mu_);
  auto it = channels_.find(channel);
  return it == channels_.end() ? 0 : it->second.next_seq - 1;
}

}  // namespace evstream
