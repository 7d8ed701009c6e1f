#include "shardchain/validation.hpp"

#include "shardchain/abi.hpp"

namespace shardchain {

std::optional<std::string> check_transaction(const Transaction& tx) {
  if (tx.input.empty()) return std::nullopt;
  if (find_function(tx.input) == nullptr)
    return "tx " + std::to_string(tx.tx_id) + ": unregistered function selector";
  return std::nullopt;
}

std::optional<std::string> check_block(const Block& block) {
  for (std::size_t i = 0; i < block.txns.size(); ++i) {
    const auto& tx = block.txns[i];
    if (tx.tx_id != i) return "tx ids are not dense from 0 at position " + std::to_string(i);
    if (tx.block_number != block.number)
      return "tx " + std::to_string(i) + " carries block number " + std::to_string(tx.block_number);
    if (auto err = check_transaction(tx)) return err;
  }
  if (block.uncles.size() > kMaxUncles) return "more than two uncles";
  if (block.shard_hints) {
    const auto& hints = *block.shard_hints;
    if (hints.size() != block.txns.size()) return "shard hints do not cover every transaction";
    // Keys are unique and sorted, so size equality plus the max key pins the set.
    if (!hints.empty() && hints.rbegin()->first != block.txns.size() - 1)
      return "shard hints reference unknown transactions";
  }
  return std::nullopt;
}

}  // namespace shardchain
