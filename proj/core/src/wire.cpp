#include "shardchain/wire.hpp"

#include "shardchain/codec.hpp"
#include "shardchain/errors.hpp"

namespace shardchain {

namespace {

void encode_outcome(ByteWriter& w, const ExecOutcome& o) {
  w.u8(static_cast<std::uint8_t>(o.status));
  w.u8(o.reason ? 1 : 0);
  if (o.reason) w.blob(ByteSpan(reinterpret_cast<const std::uint8_t*>(o.reason->data()), o.reason->size()));
  w.count(o.touched.size());
  for (const auto& a : o.touched) w.fixed(a);
}

ExecOutcome decode_outcome(ByteReader& r) {
  ExecOutcome o;
  auto status = r.u8();
  if (status > 1) throw DecodeError("bad outcome status");
  o.status = static_cast<ExecStatus>(status);
  auto has_reason = r.u8();
  if (has_reason > 1) throw DecodeError("presence byte must be 0 or 1");
  if (has_reason) {
    auto b = r.blob();
    o.reason = std::string(b.begin(), b.end());
  }
  auto n = r.count(20);
  for (std::uint32_t i = 0; i < n; ++i) o.touched.push_back(r.address());
  return o;
}

struct Encoder {
  ByteWriter& w;

  void operator()(const ExecuteShardsReq& m) const {
    w.u64(m.block_number);
    w.count(m.txns.size());
    for (const auto& tx : m.txns) encode_transaction(w, tx);
    encode_state(w, m.state_slice);
  }
  void operator()(const ExecuteShardsResp& m) const {
    w.u64(m.block_number);
    encode_state(w, m.state_slice);
    w.count(m.outcomes.size());
    for (const auto& o : m.outcomes) encode_outcome(w, o);
  }
  void operator()(const MineReq& m) const {
    w.blob(canonical_encode(m.block, false));
    w.fixed(m.target.value());
    w.u64(m.part.start);
    w.u64(m.part.stride);
  }
  void operator()(const MineFound& m) const {
    w.u64(m.block_number);
    w.u64(m.nonce);
  }
  void operator()(const MineCancel& m) const { w.u64(m.block_number); }
  void operator()(const Ping& m) const { w.u32(m.follower_id); }
  void operator()(const Pong& m) const { w.u32(m.follower_id); }
};

Message decode_body(MessageKind kind, ByteReader& r) {
  switch (kind) {
    case MessageKind::ExecuteShardsReq: {
      ExecuteShardsReq m;
      m.block_number = r.u64();
      auto n = r.count(65);
      m.txns.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) m.txns.push_back(decode_transaction(r));
      m.state_slice = decode_state(r);
      return m;
    }
    case MessageKind::ExecuteShardsResp: {
      ExecuteShardsResp m;
      m.block_number = r.u64();
      m.state_slice = decode_state(r);
      auto n = r.count(6);
      m.outcomes.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) m.outcomes.push_back(decode_outcome(r));
      return m;
    }
    case MessageKind::MineReq: {
      MineReq m;
      auto block = r.blob();
      m.block = decode_block(block, false);
      auto target = r.hash();
      if (target.is_zero()) throw DecodeError("zero target");
      m.target = Target(target);
      m.part.start = r.u64();
      m.part.stride = r.u64();
      if (!m.part.valid()) throw DecodeError("invalid search partition");
      return m;
    }
    case MessageKind::MineFound: {
      MineFound m;
      m.block_number = r.u64();
      m.nonce = r.u64();
      return m;
    }
    case MessageKind::MineCancel: return MineCancel{r.u64()};
    case MessageKind::Ping: return Ping{r.u32()};
    case MessageKind::Pong: return Pong{r.u32()};
  }
  throw DecodeError("unknown message kind");
}

}  // namespace

bool MineReq::operator==(const MineReq& o) const {
  Block a = block, b = o.block;
  a.nonce = b.nonce = 0;
  return a == b && target == o.target && part.start == o.part.start && part.stride == o.part.stride;
}

MessageKind kind_of(const Message& msg) { return static_cast<MessageKind>(msg.index() + 1); }

const char* kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::ExecuteShardsReq: return "ExecuteShardsReq";
    case MessageKind::ExecuteShardsResp: return "ExecuteShardsResp";
    case MessageKind::MineReq: return "MineReq";
    case MessageKind::MineFound: return "MineFound";
    case MessageKind::MineCancel: return "MineCancel";
    case MessageKind::Ping: return "Ping";
    case MessageKind::Pong: return "Pong";
  }
  return "Unknown";
}

Bytes encode_payload(const Message& msg) {
  ByteWriter w;
  std::visit(Encoder{w}, msg);
  return std::move(w).take();
}

Message decode_payload(std::uint8_t kind, ByteSpan payload) {
  if (kind < 1 || kind > 7) throw ProtocolError("unknown message kind " + std::to_string(kind));
  try {
    ByteReader r(payload);
    auto msg = decode_body(static_cast<MessageKind>(kind), r);
    r.expect_done();
    return msg;
  } catch (const DecodeError& e) {
    throw ProtocolError(std::string("malformed ") + kind_name(static_cast<MessageKind>(kind)) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(std::string("malformed payload: ") + e.what());
  }
}

Bytes encode_frame(std::uint64_t request_id, const Message& msg) {
  auto payload = encode_payload(msg);
  auto length = kFrameHeaderLength + payload.size();
  if (length > kMaxFrameLength) throw ProtocolError("frame exceeds maximum length");
  ByteWriter w(4 + length);
  w.u32(static_cast<std::uint32_t>(length));
  w.u8(static_cast<std::uint8_t>(kind_of(msg)));
  w.u64(request_id);
  w.raw(payload);
  return std::move(w).take();
}

void check_frame_length(std::uint32_t length) {
  if (length < kFrameHeaderLength) throw ProtocolError("frame length below header size");
  if (length > kMaxFrameLength) throw ProtocolError("frame length " + std::to_string(length) + " exceeds limit");
}

Frame parse_frame(ByteSpan bytes) {
  if (bytes.size() < 4) throw ProtocolError("truncated frame length");
  ByteReader r(bytes);
  auto length = r.u32();
  check_frame_length(length);
  if (r.remaining() < length) throw ProtocolError("truncated frame");
  if (r.remaining() > length) throw ProtocolError("overlong frame: bytes past declared length");
  Frame f;
  auto kind = r.u8();
  f.request_id = r.u64();
  auto payload = r.raw(length - kFrameHeaderLength);
  f.message = decode_payload(kind, payload);
  f.kind = static_cast<MessageKind>(kind);
  return f;
}

}  // namespace shardchain
