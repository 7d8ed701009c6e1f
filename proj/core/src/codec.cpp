#include "shardchain/codec.hpp"

#include "shardchain/errors.hpp"
#include "shardchain/hash.hpp"

namespace shardchain {

namespace {

constexpr std::size_t kMinTxSize = 8 + 20 + 20 + 16 + 4 + 1 + 8;
constexpr std::size_t kUncleSize = 8 + 20;
constexpr std::size_t kHintSize = 8 + 4;
constexpr std::size_t kMinAccountSize = 20 + 16 + 4;
constexpr std::size_t kSlotSize = 64;

std::uint8_t presence(ByteReader& r) {
  auto p = r.u8();
  if (p > 1) throw DecodeError("presence byte must be 0 or 1");
  return p;
}

}  // namespace

void encode_transaction(ByteWriter& w, const Transaction& tx) {
  w.u64(tx.tx_id);
  w.fixed(tx.from);
  w.fixed(tx.to);
  w.u128(tx.value);
  w.blob(tx.input);
  w.u8(tx.creates ? 1 : 0);
  if (tx.creates) w.fixed(*tx.creates);
  w.u64(tx.block_number);
}

Transaction decode_transaction(ByteReader& r) {
  Transaction tx;
  tx.tx_id = r.u64();
  tx.from = r.address();
  tx.to = r.address();
  tx.value = r.u128();
  tx.input = r.blob();
  if (presence(r)) tx.creates = r.address();
  tx.block_number = r.u64();
  return tx;
}

Bytes canonical_encode(const Block& block, bool include_nonce) {
  std::size_t hint = 8 + 32 + 20 + 8 + 4 + 4 + 32 + 1 + 8 + block.txns.size() * (kMinTxSize + 68) +
                     block.uncles.size() * kUncleSize;
  ByteWriter w(hint);
  w.u64(block.number);
  w.fixed(block.prev_hash);
  w.fixed(block.miner);
  w.u64(block.timestamp);
  w.count(block.txns.size());
  for (const auto& tx : block.txns) encode_transaction(w, tx);
  w.count(block.uncles.size());
  for (const auto& u : block.uncles) {
    w.u64(u.number);
    w.fixed(u.miner);
  }
  w.fixed(block.state_digest);
  w.u8(block.shard_hints ? 1 : 0);
  if (block.shard_hints) {
    w.count(block.shard_hints->size());
    for (const auto& [tx_id, shard] : *block.shard_hints) {
      w.u64(tx_id);
      w.u32(shard);
    }
  }
  if (include_nonce) w.u64(block.nonce);
  return std::move(w).take();
}

Block decode_block(ByteSpan bytes, bool has_nonce) {
  ByteReader r(bytes);
  Block b;
  b.number = r.u64();
  b.prev_hash = r.hash();
  b.miner = r.address();
  b.timestamp = r.u64();
  auto ntx = r.count(kMinTxSize);
  b.txns.reserve(ntx);
  for (std::uint32_t i = 0; i < ntx; ++i) b.txns.push_back(decode_transaction(r));
  auto nuncles = r.count(kUncleSize);
  for (std::uint32_t i = 0; i < nuncles; ++i) {
    Uncle u;
    u.number = r.u64();
    u.miner = r.address();
    b.uncles.push_back(u);
  }
  b.state_digest = r.hash();
  if (presence(r)) {
    ShardHints hints;
    auto n = r.count(kHintSize);
    std::optional<TxId> prev;
    for (std::uint32_t i = 0; i < n; ++i) {
      auto tx_id = r.u64();
      auto shard = r.u32();
      if (prev && tx_id <= *prev) throw DecodeError("shard hints not in ascending tx_id order");
      prev = tx_id;
      hints.emplace(tx_id, shard);
    }
    b.shard_hints = std::move(hints);
  }
  if (has_nonce) b.nonce = r.u64();
  r.expect_done();
  return b;
}

Hash256 block_hash(const Block& block) { return sha256(canonical_encode(block, true)); }

void encode_state(ByteWriter& w, const WorldState& state) {
  w.count(state.size());
  for (const auto& [addr, acct] : state.entries()) {
    w.fixed(addr);
    w.u128(acct.balance);
    w.count(acct.storage.size());
    for (const auto& [k, v] : acct.storage) {
      w.fixed(k);
      w.fixed(v);
    }
  }
}

WorldState decode_state(ByteReader& r) {
  WorldState state;
  auto n = r.count(kMinAccountSize);
  std::optional<Address> prev;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto addr = r.address();
    if (prev && !(*prev < addr)) throw DecodeError("state accounts not in ascending order");
    prev = addr;
    Account acct;
    acct.balance = r.u128();
    auto slots = r.count(kSlotSize);
    for (std::uint32_t j = 0; j < slots; ++j) {
      auto k = r.hash();
      auto v = r.hash();
      if (v.is_zero()) throw DecodeError("zero storage value on the wire");
      if (!acct.storage.empty() && !(acct.storage.rbegin()->first < k))
        throw DecodeError("storage keys not in ascending order");
      acct.storage.emplace_hint(acct.storage.end(), k, v);
    }
    state.put(addr, std::move(acct));
  }
  return state;
}

}  // namespace shardchain
