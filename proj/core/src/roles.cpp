#include "shardchain/roles.hpp"

#include <chrono>

#include "shardchain/codec.hpp"
#include "shardchain/errors.hpp"
#include "shardchain/validation.hpp"

namespace shardchain {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

double elapsed_us(Clock::time_point since) {
  return std::chrono::duration<double, std::micro>(Clock::now() - since).count();
}

struct Executed {
  WorldState state;
  std::vector<ExecOutcome> outcomes;
  std::optional<ShardStats> stats;
};

/// Runs a sharded block either on the community or, without followers,
/// shard by shard on the leader.
Executed execute_sharded(const std::vector<Transaction>& txns, const Analysis& analysis, const WorldState& state,
                         Community* community, std::uint64_t block_number, const SyntheticCost& cost) {
  if (community == nullptr || community->size() == 0) {
    auto r = execute_shard(txns, state, cost);
    return {std::move(r.state), std::move(r.outcomes), shard_stats(analysis)};
  }
  auto assignment = load_balance(analysis.shards, community->follower_ids(), txns);
  auto r = community->dispatch_execution(assignment, state, block_number);
  return {std::move(r.state), std::move(r.outcomes), shard_stats(analysis, &assignment)};
}

}  // namespace

SealedBlock mine_block_serial(Block candidate, const LocalChain& chain, const Target& target,
                              const SyntheticCost& cost) {
  auto start = Clock::now();
  SealedBlock out;
  auto exec_start = Clock::now();
  auto r = execute_shard(candidate.txns, chain.tip_state(), cost);
  out.timings.exec_ms = elapsed_ms(exec_start);
  candidate.state_digest = state_digest(r.state);
  candidate.shard_hints.reset();

  auto pow_start = Clock::now();
  auto found = search_nonce(candidate, target, SearchPartition{0, 1});
  out.timings.pow_ms = elapsed_ms(pow_start);
  candidate.nonce = *found.nonce;
  out.mining.nonce = *found.nonce;
  out.mining.searchers = 1;
  out.mining.local_attempts = found.attempts;

  out.block = std::move(candidate);
  out.post_state = std::move(r.state);
  out.outcomes = std::move(r.outcomes);
  out.timings.total_ms = elapsed_ms(start);
  return out;
}

SealedBlock mine_block_community(Block candidate, const LocalChain& chain, const Target& target,
                                 Community& community, const PipelineOptions& options) {
  auto start = Clock::now();
  SealedBlock out;

  auto analyze_start = Clock::now();
  auto analysis = analyze(candidate.txns, options.deps);
  out.timings.analyze_us = elapsed_us(analyze_start);

  auto exec_start = Clock::now();
  auto executed = execute_sharded(candidate.txns, analysis, chain.tip_state(), &community, candidate.number,
                                  options.cost);
  out.timings.exec_ms = elapsed_ms(exec_start);
  out.shards = executed.stats;

  candidate.state_digest = state_digest(executed.state);
  if (options.emit_hints) {
    ShardHints hints;
    for (std::size_t i = 0; i < analysis.shard_of.size(); ++i) hints.emplace(i, analysis.shard_of[i]);
    candidate.shard_hints = std::move(hints);
  } else {
    candidate.shard_hints.reset();
  }

  auto pow_start = Clock::now();
  out.mining = community.dispatch_mining(candidate, target);
  out.timings.pow_ms = elapsed_ms(pow_start);
  candidate.nonce = out.mining.nonce;

  out.block = std::move(candidate);
  out.post_state = std::move(executed.state);
  out.outcomes = std::move(executed.outcomes);
  out.timings.total_ms = elapsed_ms(start);
  return out;
}

const char* to_string(ValidatorMode mode) {
  switch (mode) {
    case ValidatorMode::Serial: return "serial";
    case ValidatorMode::Default: return "default";
    case ValidatorMode::Sharing: return "sharing";
  }
  return "?";
}

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::None: return "Accept";
    case RejectReason::Malformed: return "Malformed";
    case RejectReason::BadParent: return "BadParent";
    case RejectReason::BadHints: return "BadHints";
    case RejectReason::BadPow: return "BadPow";
    case RejectReason::StateMismatch: return "StateMismatch";
  }
  return "?";
}

Verdict validate_block(const Block& block, const LocalChain& chain, ValidatorMode mode, Community* community,
                       const Target& target, const PipelineOptions& options) {
  auto start = Clock::now();
  Verdict v;
  auto reject = [&](RejectReason reason, std::string detail) {
    v.reason = reason;
    v.detail = std::move(detail);
    v.timings.total_ms = elapsed_ms(start);
    return v;
  };

  if (auto err = check_block(block)) return reject(RejectReason::Malformed, *err);
  if (block.number != chain.tip_number() + 1 || block.prev_hash != chain.tip_hash())
    return reject(RejectReason::BadParent, "block does not extend the local tip");
  try {
    check_uncles(block.uncles, block.number);
  } catch (const InvalidUncles& e) {
    return reject(RejectReason::Malformed, e.what());
  }

  std::optional<Analysis> analysis;
  if (mode == ValidatorMode::Sharing && block.shard_hints) {
    auto check_start = Clock::now();
    if (!hints_respect_dependencies(block.txns, *block.shard_hints, options.deps))
      return reject(RejectReason::BadHints, "shard hints split dependent transactions");
    analysis = shards_from_hints(*block.shard_hints);
    v.timings.analyze_us = elapsed_us(check_start);
  }

  if (!check_pow(block, target)) return reject(RejectReason::BadPow, "block hash does not meet the target");

  auto exec_start = Clock::now();
  Executed executed;
  if (mode == ValidatorMode::Serial) {
    auto r = execute_shard(block.txns, chain.tip_state(), options.cost);
    executed = {std::move(r.state), std::move(r.outcomes), std::nullopt};
  } else {
    if (!analysis) {
      v.recomputed_shards = mode == ValidatorMode::Sharing;
      auto analyze_start = Clock::now();
      analysis = analyze(block.txns, options.deps);
      v.timings.analyze_us = elapsed_us(analyze_start);
    }
    try {
      executed = execute_sharded(block.txns, *analysis, chain.tip_state(), community, block.number, options.cost);
    } catch (const DispatchError&) {
      v.fell_back_to_serial = true;
    } catch (const MergeConflict&) {
      v.fell_back_to_serial = true;
    }
    if (v.fell_back_to_serial) {
      auto r = execute_shard(block.txns, chain.tip_state(), options.cost);
      executed = {std::move(r.state), std::move(r.outcomes), std::nullopt};
    }
  }
  v.timings.exec_ms = elapsed_ms(exec_start);
  v.shards = executed.stats;
  v.post_state = std::move(executed.state);

  if (state_digest(v.post_state) != block.state_digest)
    return reject(RejectReason::StateMismatch, "re-executed state differs from the block's state digest");
  v.timings.total_ms = elapsed_ms(start);
  return v;
}

}  // namespace shardchain
