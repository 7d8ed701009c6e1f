#pragma once

#include <optional>
#include <string>

#include "shardchain/types.hpp"

namespace shardchain {

/// Structural checks only; nothing here executes transactions.
/// Each returns the first violation found, or nullopt.

/// Nonempty input must start with a registered selector.
std::optional<std::string> check_transaction(const Transaction& tx);

/// tx_ids dense from 0 in list order, every tx stamped with the block
/// number, at most two uncles, shard hints (when present) keyed by exactly
/// the block's tx_ids.
std::optional<std::string> check_block(const Block& block);

}  // namespace shardchain
