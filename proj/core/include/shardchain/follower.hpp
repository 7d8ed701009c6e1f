#pragma once

#include <atomic>
#include <optional>
#include <string>

#include "shardchain/engine.hpp"
#include "shardchain/transport.hpp"

namespace shardchain {

/// Follower side of the community protocol. Executes shipped shards against
/// the shipped state slice and searches its nonce residue class on a
/// separate worker so that MineCancel can interrupt it.
class FollowerService {
 public:
  struct Stats {
    std::atomic<std::uint64_t> exec_requests{0};
    std::atomic<std::uint64_t> txns_executed{0};
    std::atomic<std::uint64_t> mine_requests{0};
    std::atomic<std::uint64_t> nonces_found{0};
    std::atomic<std::uint64_t> searches_cancelled{0};
    std::atomic<std::uint64_t> cancels_observed{0};
    std::atomic<std::uint64_t> protocol_errors{0};
  };

  FollowerService(FollowerId id, SyntheticCost cost) : id_(id), cost_(cost) {}

  /// Serves one connection until the peer closes it (returns nullopt) or a
  /// protocol violation occurs (the stream is closed and the error message
  /// returned). Never throws for peer misbehaviour.
  std::optional<std::string> serve(Stream& stream);

  FollowerId id() const { return id_; }
  const Stats& stats() const { return stats_; }

 private:
  FollowerId id_;
  SyntheticCost cost_;
  Stats stats_;
};

}  // namespace shardchain
