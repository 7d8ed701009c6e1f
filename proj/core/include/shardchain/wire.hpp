#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "shardchain/engine.hpp"
#include "shardchain/pow.hpp"
#include "shardchain/types.hpp"

namespace shardchain {

// Frame layout on a community connection:
//
//   length:u32  kind:u8  request_id:u64  payload
//
// `length` counts kind + request_id + payload. Payloads use the canonical
// encoding from codec.hpp.

enum class MessageKind : std::uint8_t {
  ExecuteShardsReq = 1,
  ExecuteShardsResp = 2,
  MineReq = 3,
  MineFound = 4,
  MineCancel = 5,
  Ping = 6,
  Pong = 7,
};

inline constexpr std::uint32_t kFrameHeaderLength = 1 + 8;
inline constexpr std::uint32_t kMaxFrameLength = 64u << 20;

struct ExecuteShardsReq {
  std::uint64_t block_number = 0;
  std::vector<Transaction> txns;
  /// Only the accounts the transactions touch, defaults included.
  WorldState state_slice;

  bool operator==(const ExecuteShardsReq&) const = default;
};

struct ExecuteShardsResp {
  std::uint64_t block_number = 0;
  WorldState state_slice;
  std::vector<ExecOutcome> outcomes;

  bool operator==(const ExecuteShardsResp&) const = default;
};

struct MineReq {
  /// Nonce is not transmitted.
  Block block;
  Target target = Target::max();
  SearchPartition part;

  bool operator==(const MineReq&) const;
};

struct MineFound {
  std::uint64_t block_number = 0;
  std::uint64_t nonce = 0;
  bool operator==(const MineFound&) const = default;
};

struct MineCancel {
  std::uint64_t block_number = 0;
  bool operator==(const MineCancel&) const = default;
};

struct Ping {
  FollowerId follower_id = 0;
  bool operator==(const Ping&) const = default;
};

struct Pong {
  FollowerId follower_id = 0;
  bool operator==(const Pong&) const = default;
};

using Message = std::variant<ExecuteShardsReq, ExecuteShardsResp, MineReq, MineFound, MineCancel, Ping, Pong>;

MessageKind kind_of(const Message& msg);
const char* kind_name(MessageKind kind);

struct Frame {
  MessageKind kind = MessageKind::Ping;
  std::uint64_t request_id = 0;
  Message message;
};

Bytes encode_payload(const Message& msg);
/// Throws ProtocolError on unknown kinds, malformed or trailing bytes.
Message decode_payload(std::uint8_t kind, ByteSpan payload);

Bytes encode_frame(std::uint64_t request_id, const Message& msg);

/// Validates a length field read off the wire.
void check_frame_length(std::uint32_t length);

/// Parses exactly one complete frame (length prefix included) from `bytes`.
/// Truncated, overlong, or malformed input throws ProtocolError.
Frame parse_frame(ByteSpan bytes);

}  // namespace shardchain
