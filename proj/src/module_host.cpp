#include "evstream/module_host.hpp"

#include "evstream/glob.hpp"

namespace evstream {

std::string ModuleHost::event_payload(std::string_view key, std::string_view value) {
  std::string payload;
  payload.reserve(key.size() + 1 + value.size());
  payload.append(key);
  payload.push_back(static_cast<char>(kEventPayloadSeparator));
  payload.append(value);
  return payload;
}

Result<uint64_t> ModuleHost::register_callback(OpMask op_mask, std::string_view key_filter,
                                               std::string_view target_channel) {
  if ((op_mask & kAllOps) == 0) return Status::EmptyOpMask;
  if ((op_mask & ~kAllOps) != 0) return Status::BadFrame;
  if (!glob_valid(key_filter)) return Status::InvalidGlob;
  if (!channel_name_valid(target_channel)) return Status::InvalidChannelName;

  std::lock_guard lock(mu_);
  uint64_t id = next_id_++;
  regs_.push_back({id, op_mask, std::string(key_filter), std::string(target_channel)});
  return id;
}

Result<void> ModuleHost::unregister_callback(uint64_t id) {
  std::lock_guard lock(mu_);
  for (auto it = regs_.begin(); it != regs_.end(); ++it) {
    if (it->id == id) {
      regs_.erase(it);
      return {};
    }
  }
  return Status::UnknownId;
}

std::vector<EmittedEvent> ModuleHost::dispatch(OpKind op, std::string_view key,
                                               std::string_view value) {
  std::lock_guard lock(mu_);
  std::vector<EmittedEvent> emitted;
  std::string payload;  // built once on first match, shared across registrations
  bool payload_built = false;
  for (const auto& reg : regs_) {  // regs_ is id-ascending by construction
    if (!mask_has(reg.op_mask, op) || !glob_match(reg.key_filter, key)) continue;
    if (!payload_built) {
      payload = event_payload(key, value);
      payload_built = true;
    }
    auto res = publish_(reg.target_channel, payload);
    if (!res.ok()) continue;  // channel errors are precluded by registration checks
    EmittedEvent e;
    e.registration_id = reg.id;
    e.event.channel = reg.target_channel;
    e.event.seq = res.value().seq;
    e.event.publish_ts_ns = res.value().publish_ts_ns;
    e.event.payload = payload;
    e.delivered = res.value().delivered;
    emitted.push_back(std::move(e));
  }
  return emitted;
}

std::vector<CallbackRegistration> ModuleHost::registrations() const {
  std::lock_guard lock(mu_);
  return regs_;
}

}  // namespace evstream
