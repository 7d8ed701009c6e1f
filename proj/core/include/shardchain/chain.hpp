#pragma once

#include <map>
#include <vector>

#include "shardchain/types.hpp"

namespace shardchain {

/// Append-only linear chain with the state after its last block.
class LocalChain {
 public:
  explicit LocalChain(WorldState genesis_state = {}, std::uint64_t genesis_number = 0);

  std::uint64_t tip_number() const { return tip_number_; }
  const Hash256& tip_hash() const { return tip_hash_; }
  const WorldState& tip_state() const { return tip_state_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  /// Requires number = tip + 1, prev_hash = tip hash and a state digest that
  /// matches `post_state`; throws std::invalid_argument otherwise.
  void append(Block block, WorldState post_state);

  /// Re-checks every prev_hash link and the tip state digest.
  bool verify_links() const;

 private:
  std::vector<Block> blocks_;
  WorldState tip_state_;
  Hash256 tip_hash_;
  std::uint64_t genesis_number_;
  std::uint64_t tip_number_;
};

inline constexpr std::uint64_t kMaxUncleDepth = 7;

/// Off-chain record of uncle and nephew credits.
class RewardLedger {
 public:
  explicit RewardLedger(Wei base_reward = 3 * kEther) : base_reward_(base_reward) {}

  Wei base_reward() const { return base_reward_; }

  /// base_reward / 32, truncating.
  static Wei nephew_reward(Wei base_reward);
  /// (uncle + 8 - nephew) * base_reward / 8, truncating. Throws InvalidUncles
  /// unless 1 <= nephew - uncle <= 7.
  static Wei uncle_reward(std::uint64_t uncle_number, std::uint64_t nephew_number, Wei base_reward);

  /// Credits the including miner and each uncle miner for `block`.
  void credit(const Block& block);

  Wei balance(const Address& who) const;
  const std::map<Address, Wei>& credits() const { return credits_; }

 private:
  Wei base_reward_;
  std::map<Address, Wei> credits_;
};

/// Throws InvalidUncles for more than two uncles or any uncle outside the
/// inclusion window of a block numbered `nephew_number`.
void check_uncles(const std::vector<Uncle>& uncles, std::uint64_t nephew_number);

/// Candidate block on top of `chain`: transactions renumbered densely from
/// zero in arrival order and stamped with the new block number; state digest,
/// shard hints and nonce left unset. `pending` must be nonempty.
Block create_block(std::vector<Transaction> pending, std::vector<Uncle> uncles, const LocalChain& chain,
                   const Address& miner, std::uint64_t timestamp = 0);

}  // namespace shardchain
