#include "shardchain/chain.hpp"

#include <stdexcept>

#include "shardchain/codec.hpp"
#include "shardchain/errors.hpp"

namespace shardchain {

LocalChain::LocalChain(WorldState genesis_state, std::uint64_t genesis_number)
    : tip_state_(std::move(genesis_state)), genesis_number_(genesis_number), tip_number_(genesis_number) {}

void LocalChain::append(Block block, WorldState post_state) {
  if (block.number != tip_number_ + 1) throw std::invalid_argument("block does not extend the tip");
  if (block.prev_hash != tip_hash_) throw std::invalid_argument("block prev_hash does not match the tip");
  if (state_digest(post_state) != block.state_digest)
    throw std::invalid_argument("post state does not match the block's state digest");
  tip_hash_ = block_hash(block);
  tip_number_ = block.number;
  tip_state_ = std::move(post_state);
  blocks_.push_back(std::move(block));
}

bool LocalChain::verify_links() const {
  Hash256 prev;
  std::uint64_t number = genesis_number_;
  for (const auto& b : blocks_) {
    if (b.prev_hash != prev || b.number != number + 1) return false;
    prev = block_hash(b);
    number = b.number;
  }
  if (prev != tip_hash_) return false;
  return blocks_.empty() || state_digest(tip_state_) == blocks_.back().state_digest;
}

Wei RewardLedger::nephew_reward(Wei base_reward) { return base_reward / 32; }

Wei RewardLedger::uncle_reward(std::uint64_t uncle_number, std::uint64_t nephew_number, Wei base_reward) {
  if (uncle_number >= nephew_number || nephew_number - uncle_number > kMaxUncleDepth)
    throw InvalidUncles("uncle " + std::to_string(uncle_number) + " outside the inclusion window of block " +
                        std::to_string(nephew_number));
  auto weight = static_cast<Wei>(uncle_number + 8 - nephew_number);
  return weight * base_reward / 8;
}

void RewardLedger::credit(const Block& block) {
  check_uncles(block.uncles, block.number);
  for (const auto& u : block.uncles) {
    credits_[block.miner] += nephew_reward(base_reward_);
    credits_[u.miner] += uncle_reward(u.number, block.number, base_reward_);
  }
}

Wei RewardLedger::balance(const Address& who) const {
  auto it = credits_.find(who);
  return it == credits_.end() ? 0 : it->second;
}

void check_uncles(const std::vector<Uncle>& uncles, std::uint64_t nephew_number) {
  if (uncles.size() > kMaxUncles) throw InvalidUncles("at most two uncles per block");
  for (const auto& u : uncles) RewardLedger::uncle_reward(u.number, nephew_number, 1);
}

Block create_block(std::vector<Transaction> pending, std::vector<Uncle> uncles, const LocalChain& chain,
                   const Address& miner, std::uint64_t timestamp) {
  if (pending.empty()) throw std::invalid_argument("create_block needs pending transactions");
  Block b;
  b.number = chain.tip_number() + 1;
  check_uncles(uncles, b.number);
  b.prev_hash = chain.tip_hash();
  b.miner = miner;
  b.timestamp = timestamp;
  b.uncles = std::move(uncles);
  b.txns = std::move(pending);
  for (std::size_t i = 0; i < b.txns.size(); ++i) {
    b.txns[i].tx_id = i;
    b.txns[i].block_number = b.number;
  }
  return b;
}

}  // namespace shardchain
