#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shardchain/analyzer.hpp"
#include "shardchain/chain.hpp"
#include "shardchain/engine.hpp"
#include "shardchain/leader.hpp"
#include "shardchain/pow.hpp"

namespace shardchain {

struct PipelineOptions {
  DepsMode deps = DepsMode::Full;
  /// Attach the shard id of every transaction to the sealed block.
  bool emit_hints = false;
  /// Cost applied wherever the leader executes transactions itself.
  SyntheticCost cost = SyntheticCost::zero();
};

struct BlockTimings {
  double analyze_us = 0;
  double exec_ms = 0;
  double pow_ms = 0;
  double total_ms = 0;
};

struct SealedBlock {
  Block block;
  WorldState post_state;
  std::vector<ExecOutcome> outcomes;
  BlockTimings timings;
  std::optional<ShardStats> shards;
  MiningResult mining;
};

/// Baseline miner: executes every transaction in order on the leader, then
/// searches nonces 0, 1, 2, ...
SealedBlock mine_block_serial(Block candidate, const LocalChain& chain, const Target& target,
                              const SyntheticCost& cost);

/// Community miner: shards the block, executes shards on the followers (or
/// locally when the community is empty), optionally records shard hints, then
/// searches nonces in parallel. DispatchError propagates; no block is produced.
SealedBlock mine_block_community(Block candidate, const LocalChain& chain, const Target& target,
                                 Community& community, const PipelineOptions& options);

enum class ValidatorMode { Serial, Default, Sharing };

enum class RejectReason { None, Malformed, BadParent, BadHints, BadPow, StateMismatch };

const char* to_string(ValidatorMode mode);
const char* to_string(RejectReason reason);

struct Verdict {
  RejectReason reason = RejectReason::None;
  std::string detail;
  /// Re-executed state; meaningful when the block got as far as execution.
  WorldState post_state;
  BlockTimings timings;
  std::optional<ShardStats> shards;
  /// A community dispatch failed and the block was re-executed serially.
  bool fell_back_to_serial = false;
  /// Sharing mode found no hints and recomputed shards.
  bool recomputed_shards = false;

  bool accepted() const { return reason == RejectReason::None; }
};

/// Checks structure, parent link, uncles, shard hints (Sharing mode), proof
/// of work, and finally that re-execution reproduces the block's state
/// digest. Community failures fall back to serial re-execution.
Verdict validate_block(const Block& block, const LocalChain& chain, ValidatorMode mode, Community* community,
                       const Target& target, const PipelineOptions& options);

}  // namespace shardchain
