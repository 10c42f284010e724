#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evstream/pubsub.hpp"
#include "evstream/status.hpp"
#include "evstream/types.hpp"

namespace evstream::wire {

// Frame layout (all integers big-endian):
//   magic      2 bytes  0x45 0x56
//   version    1 byte   0x01
//   frame_type 1 byte
//   body_len   4 bytes
//   body       body_len bytes
// Total size 8 + body_len; body_len is capped at 1 MiB plus a 1 KiB
// allowance for per-frame headers inside the body.

constexpr uint8_t kMagic0 = 0x45;
constexpr uint8_t kMagic1 = 0x56;
constexpr uint8_t kProtoVersion = 0x01;
constexpr size_t kHeaderBytes = 8;
constexpr size_t kMaxBodyBytes = (1u << 20) + 1024;

enum class FrameType : uint8_t {
  Set = 0x01,
  Get = 0x02,
  Del = 0x03,
  Sub = 0x10,
  Unsub = 0x11,
  Pub = 0x12,
  Evt = 0x13,
  RegCb = 0x20,
  UnregCb = 0x21,
  Reply = 0x7F,
};

bool frame_type_known(uint8_t t);

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return ByteView(reinterpret_cast<const uint8_t*>(s.data()), s.size());
}
inline std::string_view as_string(ByteView b) {
  return std::string_view(reinterpret_cast<const char*>(b.data()), b.size());
}

Result<Bytes> encode_frame(FrameType type, ByteView body);

// Incremental decoding: a complete frame (type + body view into the input
// + bytes consumed), a need-more hint (how many further bytes before the
// next decision point), or a fatal Status (BadMagic / UnsupportedVersion /
// BodyTooLarge; the connection must be closed).
struct DecodedFrame {
  uint8_t type = 0;
  ByteView body;
  size_t consumed = 0;
};
struct NeedMore {
  size_t bytes = 1;
};
using DecodeResult = std::variant<DecodedFrame, NeedMore, Status>;

DecodeResult decode_frame(ByteView stream);

// ---- big-endian primitives ----
void put_u16(Bytes& out, uint16_t v);
void put_u32(Bytes& out, uint32_t v);
void put_u64(Bytes& out, uint64_t v);
uint16_t get_u16(const uint8_t* p);
uint32_t get_u32(const uint8_t* p);
uint64_t get_u64(const uint8_t* p);

// ---- request bodies ----
// SET:     key_len u16 | key | value
// GET/DEL: key (entire body)
// SUB/UNSUB: pattern (entire body)
// PUB:     channel_len u16 | channel | payload
// REGCB:   op_mask u8 | channel_len u16 | channel | key_filter
// UNREGCB: id u64
Bytes encode_set_body(std::string_view key, std::string_view value);
Bytes encode_pub_body(std::string_view channel, std::string_view payload);
Bytes encode_regcb_body(OpMask mask, std::string_view channel, std::string_view key_filter);
Bytes encode_unregcb_body(uint64_t id);

struct SetBody {
  std::string_view key;
  std::string_view value;
};
struct PubBody {
  std::string_view channel;
  std::string_view payload;
};
struct RegCbBody {
  OpMask op_mask = 0;
  std::string_view channel;
  std::string_view key_filter;
};
Result<SetBody> parse_set_body(ByteView body);
Result<PubBody> parse_pub_body(ByteView body);
Result<RegCbBody> parse_regcb_body(ByteView body);
Result<uint64_t> parse_unregcb_body(ByteView body);

// ---- event frame body ----
// channel_len u16 | channel | seq u64 | publish_ts_ns u64 | payload
Bytes encode_evt_body(const Event& ev);

struct EvtView {
  std::string_view channel;
  uint64_t seq = 0;
  uint64_t publish_ts_ns = 0;
  std::string_view payload;
};
Result<EvtView> parse_evt_body(ByteView body);

// ---- replies ----
// status u8 | per-operation payload
Bytes encode_reply_status(Status s);
Bytes encode_reply_set(OpKind op, uint64_t version);
Bytes encode_reply_get(std::string_view value);
Bytes encode_reply_del(OpKind op);
Bytes encode_reply_sub(const std::vector<ChannelStart>& starts);
Bytes encode_reply_pub(uint64_t seq, uint64_t delivered);
Bytes encode_reply_regcb(uint64_t id);

struct ReplyView {
  Status status = Status::Ok;
  ByteView payload;
};
Result<ReplyView> parse_reply(ByteView body);

struct SetReply {
  OpKind op;
  uint64_t version;
};
struct PubReply {
  uint64_t seq;
  uint64_t delivered;
};
Result<SetReply> parse_reply_set_payload(ByteView payload);
Result<PubReply> parse_reply_pub_payload(ByteView payload);
Result<std::vector<ChannelStart>> parse_reply_sub_payload(ByteView payload);
Result<uint64_t> parse_reply_u64_payload(ByteView payload);

}  // namespace evstream::wire
