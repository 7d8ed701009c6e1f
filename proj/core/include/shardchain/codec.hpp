#pragma once

#include "shardchain/types.hpp"

namespace shardchain {

// Canonical encoding. Fields go out in declaration order, integers are
// big-endian fixed width, lists carry a u32 big-endian count and optional
// fields a presence byte. Shard hints are written in ascending tx_id order.
//
//   block  := number:u64 prev_hash:32 miner:20 timestamp:u64
//             count(txns) tx* count(uncles) (number:u64 miner:20)*
//             state_digest:32 present:u8 [count (tx_id:u64 shard:u32)*]
//             [nonce:u64]
//   tx     := tx_id:u64 from:20 to:20 value:u128 len:u32 input
//             present:u8 [creates:20] block_number:u64

void encode_transaction(ByteWriter& w, const Transaction& tx);
Transaction decode_transaction(ByteReader& r);

/// With `include_nonce` false the nonce is omitted entirely.
Bytes canonical_encode(const Block& block, bool include_nonce);
/// Inverse of canonical_encode; the whole span must be consumed.
Block decode_block(ByteSpan bytes, bool has_nonce);

/// SHA-256 of the full encoding (nonce included). Used for prev_hash links
/// and the proof-of-work check.
Hash256 block_hash(const Block& block);

/// Account list including explicit default entries:
///   count (address:20 balance:u128 count (key:32 value:32)*)*
void encode_state(ByteWriter& w, const WorldState& state);
WorldState decode_state(ByteReader& r);

}  // namespace shardchain
