#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "evstream/pubsub.hpp"
#include "evstream/status.hpp"
#include "evstream/types.hpp"

namespace evstream {

// A declarative callback rule: store mutations whose op is in op_mask and
// whose key matches key_filter become events on target_channel.
struct CallbackRegistration {
  uint64_t id = 0;
  OpMask op_mask = 0;
  std::string key_filter;
  std::string target_channel;
};

struct EmittedEvent {
  uint64_t registration_id = 0;
  Event event;
  uint64_t delivered = 0;
};

// Registration and execution of the callback rules that turn store CRUD
// into published events. Event payload is key, one 0x00 separator byte,
// value. Emissions always happen in ascending registration-id order;
// registration changes are serialized with dispatches.
class ModuleHost {
 public:
  using PublishFn =
      std::function<Result<PublishResult>(std::string_view channel, std::string_view payload)>;

  explicit ModuleHost(PublishFn publish) : publish_(std::move(publish)) {}

  // Ids are unique and strictly increasing in registration order, starting
  // at 1. Never reused after unregistration.
  Result<uint64_t> register_callback(OpMask op_mask, std::string_view key_filter,
                                     std::string_view target_channel);

  Result<void> unregister_callback(uint64_t id);

  // Called exactly once per successful store command.
  std::vector<EmittedEvent> dispatch(OpKind op, std::string_view key, std::string_view value);

  std::vector<CallbackRegistration> registrations() const;

  static std::string event_payload(std::string_view key, std::string_view value);

 private:
  mutable std::mutex mu_;
  std::vector<CallbackRegistration> regs_;
  uint64_t next_id_ = 1;
  PublishFn publish_;
};

}  // namespace evstream
