#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace evstream {

enum class OpKind : uint8_t {
  Create = 1,
  Read = 2,
  Update = 3,
  Delete = 4,
};

const char* op_name(OpKind op);

// Bitmask over OpKinds, used by callback registrations.
using OpMask = uint8_t;

constexpr OpMask op_bit(OpKind op) {
  return static_cast<OpMask>(1u << (static_cast<uint8_t>(op) - 1));
}

constexpr OpMask kAllOps =
    op_bit(OpKind::Create) | op_bit(OpKind::Read) | op_bit(OpKind::Update) | op_bit(OpKind::Delete);
constexpr OpMask kWriteOps =
    op_bit(OpKind::Create) | op_bit(OpKind::Update) | op_bit(OpKind::Delete);

constexpr bool mask_has(OpMask mask, OpKind op) { return (mask & op_bit(op)) != 0; }

// Size limits. Keys stay small (paper message sizes top out well below),
// values are capped at 1 MiB. Event payloads produced by callback dispatch
// are key + one separator byte + value, so they may exceed the plain value
// cap by up to kMaxKeyBytes + 1.
constexpr size_t kMaxKeyBytes = 512;
constexpr size_t kMaxValueBytes = 1u << 20;
constexpr size_t kMaxChannelBytes = 128;
constexpr size_t kMaxGlobBytes = 512;
constexpr size_t kMaxEventPayloadBytes = kMaxKeyBytes + 1 + kMaxValueBytes;
constexpr uint8_t kEventPayloadSeparator = 0x00;

// A channel-scoped message. seq starts at 1 per channel and is gapless;
// publish_ts_ns comes from the monotonic clock at sequence assignment.
struct Event {
  std::string channel;
  uint64_t seq = 0;
  uint64_t publish_ts_ns = 0;
  std::string payload;
};

inline bool channel_name_valid(std::string_view name) {
  return !name.empty() && name.size() <= kMaxChannelBytes;
}

}  // namespace evstream
