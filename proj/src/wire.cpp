#include "evstream/wire.hpp"

namespace evstream::wire {

bool frame_type_known(uint8_t t) {
  switch (static_cast<FrameType>(t)) {
    case FrameType::Set:
    case FrameType::Get:
    case FrameType::Del:
    case FrameType::Sub:
    case FrameType::Unsub:
    case FrameType::Pub:
    case FrameType::Evt:
    case FrameType::RegCb:
    case FrameType::UnregCb:
    case FrameType::Reply:
      return true;
  }
  return false;
}

void put_u16(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_u32(Bytes& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_u64(Bytes& out, uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<uint8_t>(v >> shift));
  }
}

uint16_t get_u16(const uint8_t* p) {
  return static_cast<uint16_t>((static_cast<uint16_t>(p[0]) << 8) | p[1]);
}

uint32_t get_u32(const uint8_t* p) {
  return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
         (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

uint64_t get_u64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

Result<Bytes> encode_frame(FrameType type, ByteView body) {
  if (!frame_type_known(static_cast<uint8_t>(type))) return Status::UnknownFrameType;
  if (body.size() > kMaxBodyBytes) return Status::BodyTooLarge;
  Bytes out;
  out.reserve(kHeaderBytes + body.size());
  out.push_back(kMagic0);
  out.push_back(kMagic1);
  out.push_back(kProtoVersion);
  out.push_back(static_cast<uint8_t>(type));
  put_u32(out, static_cast<uint32_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

DecodeResult decode_frame(ByteView stream) {
  // Validate eagerly, byte by byte, so garbage fails fast instead of
  // waiting for a bogus length to "complete".
  if (stream.size() >= 1 && stream[0] != kMagic0) return Status::BadMagic;
  if (stream.size() >= 2 && stream[1] != kMagic1) return Status::BadMagic;
  if (stream.size() >= 3 && stream[2] != kProtoVersion) return Status::UnsupportedVersion;
  if (stream.size() < kHeaderBytes) return NeedMore{kHeaderBytes - stream.size()};

  const uint32_t body_len = get_u32(stream.data() + 4);
  if (body_len > kMaxBodyBytes) return Status::BodyTooLarge;
  const size_t total = kHeaderBytes + body_len;
  if (stream.size() < total) return NeedMore{total - stream.size()};

  DecodedFrame f;
  f.type = stream[3];
  f.body = stream.subspan(kHeaderBytes, body_len);
  f.consumed = total;
  return f;
}

// ---- request bodies ----

Bytes encode_set_body(std::string_view key, std::string_view value) {
  Bytes out;
  out.reserve(2 + key.size() + value.size());
  put_u16(out, static_cast<uint16_t>(key.size()));
  out.insert(out.end(), key.begin(), key.end());
  out.insert(out.end(), value.begin(), value.end());
  return out;
}

Bytes encode_pub_body(std::string_view channel, std::string_view payload) {
  Bytes out;
  out.reserve(2 + channel.size() + payload.size());
  put_u16(out, static_cast<uint16_t>(channel.size()));
  out.insert(out.end(), channel.begin(), channel.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Bytes encode_regcb_body(OpMask mask, std::string_view channel, std::string_view key_filter) {
  Bytes out;
  out.reserve(3 + channel.size() + key_filter.size());
  out.push_back(mask);
  put_u16(out, static_cast<uint16_t>(channel.size()));
  out.insert(out.end(), channel.begin(), channel.end());
  out.insert(out.end(), key_filter.begin(), key_filter.end());
  return out;
}

Bytes encode_unregcb_body(uint64_t id) {
  Bytes out;
  put_u64(out, id);
  return out;
}

Result<SetBody> parse_set_body(ByteView body) {
  if (body.size() < 2) return Status::BadFrame;
  const uint16_t key_len = get_u16(body.data());
  if (body.size() < 2u + key_len) return Status::BadFrame;
  SetBody out;
  out.key = as_string(body.subspan(2, key_len));
  out.value = as_string(body.subspan(2u + key_len));
  return out;
}

Result<PubBody> parse_pub_body(ByteView body) {
  if (body.size() < 2) return Status::BadFrame;
  const uint16_t ch_len = get_u16(body.data());
  if (ch_len < 1 || body.size() < 2u + ch_len) return Status::BadFrame;
  PubBody out;
  out.channel = as_string(body.subspan(2, ch_len));
  out.payload = as_string(body.subspan(2u + ch_len));
  return out;
}

Result<RegCbBody> parse_regcb_body(ByteView body) {
  if (body.size() < 3) return Status::BadFrame;
  RegCbBody out;
  out.op_mask = body[0];
  const uint16_t ch_len = get_u16(body.data() + 1);
  if (ch_len < 1 || body.size() < 3u + ch_len) return Status::BadFrame;
  out.channel = as_string(body.subspan(3, ch_len));
  out.key_filter = as_string(body.subspan(3u + ch_len));
  return out;
}

Result<uint64_t> parse_unregcb_body(ByteView body) {
  if (body.size() != 8) return Status::BadFrame;
  return get_u64(body.data());
}

// ---- event frame body ----

Bytes encode_evt_body(const Event& ev) {
  Bytes out;
  out.reserve(2 + ev.channel.size() + 16 + ev.payload.size());
  put_u16(out, static_cast<uint16_t>(ev.channel.size()));
  out.insert(out.end(), ev.channel.begin(), ev.channel.end());
  put_u64(out, ev.seq);
  put_u64(out, ev.publish_ts_ns);
  out.insert(out.end(), ev.payload.begin(), ev.payload.end());
  return out;
}

Result<EvtView> parse_evt_body(ByteView body) {
  if (body.size() < 2) return Status::BadFrame;
  const uint16_t ch_len = get_u16(body.data());
  if (ch_len < 1 || body.size() < 2u + ch_len + 16u) return Status::BadFrame;
  EvtView out;
  out.channel = as_string(body.subspan(2, ch_len));
  out.seq = get_u64(body.data() + 2 + ch_len);
  out.publish_ts_ns = get_u64(body.data() + 2 + ch_len + 8);
  out.payload = as_string(body.subspan(2u + ch_len + 16u));
  return out;
}

// ---- replies ----

Bytes encode_reply_status(Status s) { return Bytes{static_cast<uint8_t>(s)}; }

Bytes encode_reply_set(OpKind op, uint64_t version) {
  Bytes out{static_cast<uint8_t>(Status::Ok), static_cast<uint8_t>(op)};
  put_u64(out, version);
  return out;
}

Bytes encode_reply_get(std::string_view value) {
  Bytes out{static_cast<uint8_t>(Status::Ok)};
  out.insert(out.end(), value.begin(), value.end());
  return out;
}

Bytes encode_reply_del(OpKind op) {
  return Bytes{static_cast<uint8_t>(Status::Ok), static_cast<uint8_t>(op)};
}

Bytes encode_reply_sub(const std::vector<ChannelStart>& starts) {
  Bytes out{static_cast<uint8_t>(Status::Ok)};
  put_u32(out, static_cast<uint32_t>(starts.size()));
  for (const auto& s : starts) {
    put_u16(out, static_cast<uint16_t>(s.channel.size()));
    out.insert(out.end(), s.channel.begin(), s.channel.end());
    put_u64(out, s.next_seq);
  }
  return out;
}

Bytes encode_reply_pub(uint64_t seq, uint64_t delivered) {
  Bytes out{static_cast<uint8_t>(Status::Ok)};
  put_u64(out, seq);
  put_u64(out, delivered);
  return out;
}

Bytes encode_reply_regcb(uint64_t id) {
  Bytes out{static_cast<uint8_t>(Status::Ok)};
  put_u64(out, id);
  return out;
}

Result<ReplyView> parse_reply(ByteView body) {
  if (body.empty()) return Status::BadFrame;
  ReplyView out;
  out.status = static_cast<Status>(body[0]);
  out.payload = body.subspan(1);
  return out;
}

Result<SetReply> parse_reply_set_payload(ByteView payload) {
  if (payload.size() != 9) return Status::BadFrame;
  SetReply out{static_cast<OpKind>(payload[0]), get_u64(payload.data() + 1)};
  return out;
}

Result<PubReply> parse_reply_pub_payload(ByteView payload) {
  if (payload.size() != 16) return Status::BadFrame;
  return PubReply{get_u64(payload.data()), get_u64(payload.data() + 8)};
}

Result<std::vector<ChannelStart>> parse_reply_sub_payload(ByteView payload) {
  if (payload.size() < 4) return Status::BadFrame;
  const uint32_t count = get_u32(payload.data());
  std::vector<ChannelStart> out;
  out.reserve(count);
  size_t off = 4;
  for (uint32_t i = 0; i < count; ++i) {
    if (payload.size() < off + 2) return Status::BadFrame;
    const uint16_t len = get_u16(payload.data() + off);
    off += 2;
    if (payload.size() < off + len + 8) return Status::BadFrame;
    ChannelStart cs;
    cs.channel.assign(as_string(payload.subspan(off, len)));
    off += len;
    cs.next_seq = get_u64(payload.data() + off);
    off += 8;
    out.push_back(std::move(cs));
  }
  if (off != payload.size()) return Status::BadFrame;
  return out;
}

Result<uint64_t> parse_reply_u64_payload(ByteView payload) {
  if (payload.size() != 8) return Status::BadFrame;
  return get_u64(payload.data());
}

}  // namespace evstream::wire
