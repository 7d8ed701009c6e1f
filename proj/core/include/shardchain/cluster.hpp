#pragma once

#include <memory>
#include <thread>
#include <vector>

#include "shardchain/follower.hpp"
#include "shardchain/leader.hpp"

namespace shardchain {

/// Single-process community: each follower runs the real protocol over an
/// in-memory pipe on its own thread.
class LocalCluster {
 public:
  LocalCluster(std::size_t followers, SyntheticCost cost, Community::Options options = {});
  ~LocalCluster();
  LocalCluster(const LocalCluster&) = delete;
  LocalCluster& operator=(const LocalCluster&) = delete;

  Community& community() { return *community_; }
  std::size_t size() const { return services_.size(); }
  const FollowerService& service(std::size_t i) const { return *services_.at(i); }

  /// Closes follower i's end of its connection, as if the process died.
  void kill(std::size_t i);

 private:
  std::vector<std::unique_ptr<FollowerService>> services_;
  std::vector<StreamPtr> follower_ends_;
  std::vector<std::thread> threads_;
  std::unique_ptr<Community> community_;
};

}  // namespace shardchain
