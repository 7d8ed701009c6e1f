#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "shardchain/analyzer.hpp"
#include "shardchain/engine.hpp"
#include "shardchain/pow.hpp"
#include "shardchain/transport.hpp"

namespace shardchain {

/// Overwrites `base` with every account carried by the responses. Responses
/// must cover pairwise disjoint address sets; an overlap throws
/// MergeConflict. The result does not depend on response order.
WorldState merge_state(const WorldState& base, std::vector<ExecuteShardsResp> responses);

struct ExecutionResult {
  WorldState state;
  /// Indexed by tx_id.
  std::vector<ExecOutcome> outcomes;
};

struct MiningResult {
  std::uint64_t nonce = 0;
  /// Unset when the leader searched on its own.
  std::optional<FollowerId> winner;
  std::size_t searchers = 0;
  /// Followers that acknowledged MineCancel before the ack timeout.
  std::size_t cancel_acks = 0;
  /// MineFound claims that failed verification.
  std::size_t rejected_claims = 0;
  /// Attempts made by the leader when searching locally.
  std::uint64_t local_attempts = 0;
};

/// Leader side of a community: one connection per follower, each drained by
/// a receive thread that routes replies by request id.
class Community {
 public:
  struct Options {
    std::chrono::milliseconds exec_timeout{30'000};
    std::chrono::milliseconds mine_timeout{600'000};
    std::chrono::milliseconds cancel_ack_timeout{5'000};
  };

  struct Member {
    FollowerId id = 0;
    StreamPtr stream;
  };

  Community() : Community(std::vector<Member>{}) {}
  explicit Community(std::vector<Member> members) : Community(std::move(members), Options{}) {}
  Community(std::vector<Member> members, Options options);
  ~Community();
  Community(const Community&) = delete;
  Community& operator=(const Community&) = delete;

  std::size_t size() const { return links_.size(); }
  std::vector<FollowerId> follower_ids() const;

  /// Ships each nonempty follower list with the state slice its transactions
  /// touch, waits for every response and merges them. On any failure throws
  /// DispatchError (or MergeConflict) and `state` is left to the caller
  /// untouched. Requires size() > 0.
  ExecutionResult dispatch_execution(const ShardAssignment& assignment, const WorldState& state,
                                     std::uint64_t block_number);

  /// Partitions the nonce space across live followers (start = i, stride =
  /// F), accepts the first claim that verifies, then cancels everyone and
  /// collects acknowledgements. With no followers the leader searches alone.
  MiningResult dispatch_mining(const Block& block, const Target& target);

  /// Round-trips a Ping to every follower.
  std::size_t ping_all(std::chrono::milliseconds timeout);

  std::vector<std::string> faulty_events() const;

 private:
  struct Link {
    FollowerId id = 0;
    StreamPtr stream;
    std::thread reader;
    bool dead = false;
    std::string dead_reason;
    std::set<std::uint64_t> awaiting;
    std::vector<Frame> replies;
    std::deque<Frame> claims;
  };

  void receive_loop(Link& link);
  std::optional<Frame> take_reply(Link& link, std::uint64_t request_id);
  void fail_link(Link& link, const std::string& why);
  void log_fault(std::string event);

  Options options_;
  std::vector<std::unique_ptr<Link>> links_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::atomic<std::uint64_t> next_request_{1};
  std::optional<std::uint64_t> mining_request_;
  std::vector<std::string> faults_;
};

}  // namespace shardchain
