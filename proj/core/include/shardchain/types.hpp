#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "shardchain/bytes.hpp"

namespace shardchain {

using TxId = std::uint64_t;
using ShardId = std::uint32_t;
using FollowerId = std::uint32_t;

/// One monetary transfer or contract call. `input` is empty exactly when the
/// transaction is monetary; otherwise its first four bytes are a selector.
struct Transaction {
  TxId tx_id = 0;
  Address from;
  Address to;
  Wei value = 0;
  Bytes input;
  std::optional<Address> creates;
  std::uint64_t block_number = 0;

  bool is_contract() const { return !input.empty(); }

  bool operator==(const Transaction&) const = default;
};

struct Account {
  Wei balance = 0;
  /// Zero values are never stored; writing zero erases the slot.
  std::map<Word, Word> storage;

  bool is_default() const { return balance == 0 && storage.empty(); }

  Word load(const Word& key) const;
  void store(const Word& key, const Word& value);

  bool operator==(const Account&) const = default;
};

/// Address -> Account. An absent address reads as the default account.
/// Entries equal to the default may be held explicitly (state slices carry
/// them so that a drained account overwrites on merge), but they never
/// affect equality or the digest.
class WorldState {
 public:
  using Map = std::map<Address, Account>;

  const Account& get(const Address& addr) const;
  /// Inserts an explicit default entry when absent.
  Account& at(const Address& addr);
  void put(const Address& addr, Account account) { accounts_[addr] = std::move(account); }
  bool contains(const Address& addr) const { return accounts_.contains(addr); }
  void erase(const Address& addr) { accounts_.erase(addr); }

  /// Every address in `addrs` gets an explicit entry, default or not.
  template <typename Range>
  WorldState slice(const Range& addrs) const {
    WorldState out;
    for (const Address& a : addrs) out.accounts_[a] = get(a);
    return out;
  }

  const Map& entries() const { return accounts_; }
  std::size_t size() const { return accounts_.size(); }
  /// Drops explicit default entries.
  void compact();

  Wei total_balance() const;

  friend bool operator==(const WorldState& a, const WorldState& b);

 private:
  Map accounts_;
};

struct Uncle {
  std::uint64_t number = 0;
  Address miner;

  bool operator==(const Uncle&) const = default;
};

using ShardHints = std::map<TxId, ShardId>;

struct Block {
  std::uint64_t number = 0;
  Hash256 prev_hash;
  Address miner;
  std::uint64_t timestamp = 0;
  std::vector<Transaction> txns;
  std::vector<Uncle> uncles;
  Hash256 state_digest;
  std::optional<ShardHints> shard_hints;
  std::uint64_t nonce = 0;

  bool operator==(const Block&) const = default;
};

inline constexpr std::size_t kMaxUncles = 2;

/// SHA-256 over non-default accounts in ascending address order.
Hash256 state_digest(const WorldState& state);

}  // namespace shardchain
