#pragma once

#include <vector>

#include "shardchain/types.hpp"

namespace shardchain {

/// Which addresses create dependency edges.
enum class DepsMode {
  /// from, to, creates, plus every address-typed contract parameter.
  Full,
  /// from, to, creates only (the literal sharding rule; benchmark parity).
  FromToOnly,
};

/// Addresses a transaction may read or write, deduplicated in
/// first-appearance order. Throws DecodeError when a contract call's
/// parameters are malformed and `mode` requires decoding them.
std::vector<Address> touched_addresses(const Transaction& tx, DepsMode mode = DepsMode::Full);

/// Never throws: undecodable parameters contribute nothing, which is sound
/// because such a call fails without writing anything beyond from/to.
std::vector<Address> touched_addresses_lenient(const Transaction& tx, DepsMode mode = DepsMode::Full);

struct Shard {
  ShardId shard_id = 0;
  /// Strictly ascending, i.e. arrival order.
  std::vector<TxId> tx_ids;

  bool operator==(const Shard&) const = default;
};

struct Analysis {
  /// Ordered by shard_id: size descending, ties by smallest tx_id.
  std::vector<Shard> shards;
  /// Indexed by tx_id.
  std::vector<ShardId> shard_of;

  bool operator==(const Analysis&) const = default;
};

/// Weakly connected components of the account dependency graph, one shard
/// per component. Requires tx_ids dense from 0 in list order
/// (std::invalid_argument otherwise).
Analysis analyze(const std::vector<Transaction>& txns, DepsMode mode = DepsMode::Full);

/// Rebuilds shards from miner-supplied hints: one shard per distinct hint
/// value, ordered the same way analyze() orders components.
Analysis shards_from_hints(const ShardHints& hints);

/// True when no address is touched by transactions in two different hint
/// shards, i.e. every dependency component lies inside one hint shard.
bool hints_respect_dependencies(const std::vector<Transaction>& txns, const ShardHints& hints,
                                DepsMode mode = DepsMode::Full);

struct FollowerLoad {
  FollowerId follower = 0;
  std::vector<Transaction> txns;
};

struct ShardAssignment {
  /// Same order as the followers passed to load_balance; possibly empty lists.
  std::vector<FollowerLoad> per_follower;
  /// Indexed by tx_id.
  std::vector<ShardId> shard_of;
  /// Shard ids in the order they were placed, with the follower index chosen.
  std::vector<std::pair<ShardId, std::size_t>> placements;

  std::size_t total_txns() const;
};

/// Longest-first greedy: shards by descending size (ties by smallest tx_id)
/// each go whole to the follower with the least assigned transactions (ties
/// by lowest follower id). Throws std::invalid_argument for an empty
/// follower list.
ShardAssignment load_balance(const std::vector<Shard>& shards, const std::vector<FollowerId>& followers,
                             const std::vector<Transaction>& txns);

struct ShardStats {
  std::size_t shard_count = 0;
  std::size_t max_shard_size = 0;
  std::vector<std::size_t> per_follower_counts;
};

ShardStats shard_stats(const Analysis& analysis, const ShardAssignment* assignment = nullptr);

}  // namespace shardchain
