#include "shardchain/cluster.hpp"

namespace shardchain {

LocalCluster::LocalCluster(std::size_t followers, SyntheticCost cost, Community::Options options) {
  std::vector<Community::Member> members;
  for (std::size_t i = 0; i < followers; ++i) {
    auto [leader_end, follower_end] = make_memory_pipe();
    services_.push_back(std::make_unique<FollowerService>(static_cast<FollowerId>(i), cost));
    follower_ends_.push_back(std::move(follower_end));
    members.push_back(Community::Member{static_cast<FollowerId>(i), std::move(leader_end)});
  }
  for (std::size_t i = 0; i < followers; ++i)
    threads_.emplace_back([svc = services_[i].get(), s = follower_ends_[i].get()] { svc->serve(*s); });
  community_ = std::make_unique<Community>(std::move(members), options);
}

LocalCluster::~LocalCluster() {
  community_.reset();
  for (auto& s : follower_ends_) s->close();
  for (auto& t : threads_)
    if (t.joinable()) t.join();
}

void LocalCluster::kill(std::size_t i) { follower_ends_.at(i)->close(); }

}  // namespace shardchain
