#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "shardchain/analyzer.hpp"
#include "shardchain/cluster.hpp"
#include "shardchain/codec.hpp"
#include "shardchain/engine.hpp"
#include "shardchain/errors.hpp"
#include "shardchain/follower.hpp"
#include "shardchain/leader.hpp"
#include "shardchain/pow.hpp"
#include "support.hpp"

using namespace shardchain;
using namespace testing_support;
using namespace std::chrono_literals;

namespace {

const SyntheticCost kFree = SyntheticCost::zero();

struct Fixture {
  std::vector<Transaction> txns;
  WorldState state;
};

Fixture make_fixture(std::uint64_t seed, std::size_t n = 40) {
  std::mt19937_64 rng(seed);
  Fixture f;
  f.txns = random_block(rng, n, 50);
  for (auto& tx : f.txns) {
    for (const auto& a : touched_addresses_lenient(tx)) f.state.at(a).balance = 100;
    f.state.at(tx.to).store(slots::token_balance(tx.from), word_from_wei(3));
  }
  return f;
}

Block mining_block(std::uint64_t seed) {
  Block b;
  b.number = seed;
  b.miner = addr(seed);
  b.txns.push_back(pay(0, addr(1), addr(2), seed, seed));
  return b;
}

// Leader-side community over hand-driven follower ends.
std::pair<std::unique_ptr<Community>, std::vector<StreamPtr>> manual_community(std::size_t n,
                                                                                Community::Options options = {}) {
  std::vector<Community::Member> members;
  std::vector<StreamPtr> ends;
  for (std::size_t i = 0; i < n; ++i) {
    auto [leader_end, follower_end] = make_memory_pipe();
    members.push_back({static_cast<FollowerId>(i), std::move(leader_end)});
    ends.push_back(std::move(follower_end));
  }
  return {std::make_unique<Community>(std::move(members), options), std::move(ends)};
}

}  // namespace

TEST(Merge, EmptyResponsesKeepBase) {
  WorldState base;
  base.at(addr(1)).balance = 4;
  EXPECT_EQ(merge_state(base, {}), base);
}

TEST(Merge, OrderDoesNotMatter) {
  auto f = make_fixture(1);
  auto a = analyze(f.txns);
  std::vector<ExecuteShardsResp> responses;
  for (const auto& sh : a.shards) {
    std::vector<Transaction> part;
    std::set<Address> addrs;
    for (auto id : sh.tx_ids) {
      part.push_back(f.txns[id]);
      for (const auto& x : touched_addresses_lenient(f.txns[id])) addrs.insert(x);
    }
    auto r = execute_shard(part, f.state.slice(addrs), kFree);
    responses.push_back({1, r.state, r.outcomes});
  }
  auto forward = state_digest(merge_state(f.state, responses));
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(responses.begin(), responses.end(), rng);
    EXPECT_EQ(state_digest(merge_state(f.state, responses)), forward);
  }
  EXPECT_EQ(forward, state_digest(execute_shard(f.txns, f.state, kFree).state));
}

TEST(Merge, OverlapIsConflict) {
  ExecuteShardsResp a, b;
  a.state_slice.at(addr(1)).balance = 1;
  b.state_slice.at(addr(1)).balance = 2;
  EXPECT_THROW(merge_state({}, {a, b}), MergeConflict);
}

TEST(Merge, DrainedAccountOverwrites) {
  WorldState base;
  base.at(addr(1)).balance = 5;
  ExecuteShardsResp r;
  r.state_slice.at(addr(1));
  EXPECT_EQ(merge_state(base, {r}), WorldState{});
}

TEST(Dispatch, MatchesSerialForEveryCommunitySize) {
  for (std::size_t followers = 1; followers <= 5; ++followers) {
    LocalCluster cluster(followers, kFree);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto f = make_fixture(seed * 10 + followers);
      auto a = analyze(f.txns);
      auto asg = load_balance(a.shards, cluster.community().follower_ids(), f.txns);
      auto result = cluster.community().dispatch_execution(asg, f.state, 1);
      auto serial = execute_shard(f.txns, f.state, kFree);
      ASSERT_EQ(state_digest(result.state), state_digest(serial.state));
      ASSERT_EQ(result.outcomes, serial.outcomes);
    }
  }
}

TEST(Dispatch, KilledFollowerRaisesDispatchError) {
  LocalCluster cluster(2, kFree, {.exec_timeout = 2s});
  auto f = make_fixture(9);
  auto asg = load_balance(analyze(f.txns).shards, cluster.community().follower_ids(), f.txns);
  cluster.kill(1);
  auto before = f.state;
  try {
    cluster.community().dispatch_execution(asg, f.state, 1);
    FAIL() << "expected DispatchError";
  } catch (const DispatchError& e) {
    EXPECT_EQ(e.follower_id(), 1u);
  }
  EXPECT_EQ(f.state.entries(), before.entries());
}

TEST(Dispatch, LinkAlreadyMarkedDead) {
  LocalCluster cluster(2, kFree, {.exec_timeout = 2s});
  auto f = make_fixture(9);
  auto asg = load_balance(analyze(f.txns).shards, cluster.community().follower_ids(), f.txns);
  cluster.kill(0);
  EXPECT_EQ(cluster.community().ping_all(500ms), 1u);
  EXPECT_THROW(cluster.community().dispatch_execution(asg, f.state, 1), DispatchError);
  // The surviving link still works.
  auto solo = load_balance(analyze(f.txns).shards, {1}, f.txns);
  EXPECT_NO_THROW(cluster.community().dispatch_execution(solo, f.state, 2));
}

TEST(Dispatch, MidRequestDisconnect) {
  auto [community, ends] = manual_community(1, {.exec_timeout = 5s});
  std::jthread peer([&] {
    auto frame = read_frame(*ends[0]);
    EXPECT_EQ(frame.kind, MessageKind::ExecuteShardsReq);
    // Half a response, then the connection drops.
    auto resp = encode_frame(frame.request_id, ExecuteShardsResp{1, {}, {}});
    ends[0]->write_all(ByteSpan(resp).first(resp.size() / 2));
    ends[0]->close();
  });
  auto f = make_fixture(3);
  auto asg = load_balance(analyze(f.txns).shards, community->follower_ids(), f.txns);
  EXPECT_THROW(community->dispatch_execution(asg, f.state, 1), DispatchError);
}

TEST(Dispatch, SilentFollowerTimesOut) {
  auto [community, ends] = manual_community(1, {.exec_timeout = 100ms});
  auto f = make_fixture(3);
  auto asg = load_balance(analyze(f.txns).shards, community->follower_ids(), f.txns);
  EXPECT_THROW(community->dispatch_execution(asg, f.state, 1), DispatchError);
}

TEST(Dispatch, ResponseWithForeignAccountRejected) {
  auto [community, ends] = manual_community(1, {.exec_timeout = 5s});
  std::jthread peer([&] {
    auto frame = read_frame(*ends[0]);
    auto& req = std::get<ExecuteShardsReq>(frame.message);
    ExecuteShardsResp resp{req.block_number, req.state_slice, std::vector<ExecOutcome>(req.txns.size())};
    resp.state_slice.at(addr(987654)).balance = 1'000'000;
    write_frame(*ends[0], frame.request_id, resp);
  });
  auto f = make_fixture(5);
  auto asg = load_balance(analyze(f.txns).shards, community->follower_ids(), f.txns);
  EXPECT_THROW(community->dispatch_execution(asg, f.state, 1), DispatchError);
}

TEST(Mining, SingleFollowerFindsMinimumNonce) {
  LocalCluster cluster(1, kFree);
  const auto target = Target::pow2(248);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto b = mining_block(seed);
    auto expected = search_nonce(b, target, {});
    auto r = cluster.community().dispatch_mining(b, target);
    ASSERT_EQ(r.nonce, *expected.nonce);
    ASSERT_EQ(r.winner, std::optional<FollowerId>{0});
  }
}

TEST(Mining, FourFollowersVerifyAndAllCancel) {
  LocalCluster cluster(4, kFree);
  const auto target = Target::pow2(244);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto b = mining_block(seed);
    auto r = cluster.community().dispatch_mining(b, target);
    b.nonce = r.nonce;
    EXPECT_TRUE(check_pow(b, target));
    EXPECT_EQ(r.searchers, 4u);
    EXPECT_EQ(r.cancel_acks, 4u);
    EXPECT_EQ(r.nonce % 4, *r.winner);
  }
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(cluster.service(i).stats().cancels_observed.load(), 5u);
}

TEST(Mining, NoFollowersSearchesLocally) {
  Community empty;
  auto b = mining_block(2);
  auto r = empty.dispatch_mining(b, Target::pow2(248));
  EXPECT_FALSE(r.winner);
  EXPECT_EQ(r.nonce, *search_nonce(b, Target::pow2(248), {}).nonce);
  EXPECT_GT(r.local_attempts, 0u);
}

TEST(Mining, ForgedClaimIgnored) {
  auto [leader_end, follower_end] = make_memory_pipe();
  auto [forger_leader_end, forger_end] = make_memory_pipe();
  FollowerService honest(0, kFree);
  std::jthread honest_thread([&] { honest.serve(*follower_end); });
  std::jthread forger([&] {
    for (;;) {
      Frame f;
      try {
        f = read_frame(*forger_end);
      } catch (const TransportError&) {
        return;
      }
      if (f.kind == MessageKind::MineReq) {
        auto& req = std::get<MineReq>(f.message);
        // A nonce from the wrong residue class that does not verify either.
        write_frame(*forger_end, f.request_id, MineFound{req.block.number, 0});
      } else if (f.kind == MessageKind::MineCancel) {
        write_frame(*forger_end, f.request_id, Pong{1});
      }
    }
  });
  std::vector<Community::Member> members;
  members.push_back({0, std::move(leader_end)});
  members.push_back({1, std::move(forger_leader_end)});
  {
    Community community(std::move(members));
    const auto target = Target::pow2(240);
    auto b = mining_block(77);
    b.nonce = 0;
    ASSERT_FALSE(check_pow(b, target));
    auto r = community.dispatch_mining(b, target);
    b.nonce = r.nonce;
    EXPECT_TRUE(check_pow(b, target));
    EXPECT_EQ(r.winner, std::optional<FollowerId>{0});
    EXPECT_GE(r.rejected_claims, 1u);
    EXPECT_FALSE(community.faulty_events().empty());
  }
  follower_end->close();
  forger_end->close();
}

TEST(Follower, PingAndProtocolViolation) {
  LocalCluster cluster(3, kFree);
  EXPECT_EQ(cluster.community().ping_all(2s), 3u);

  auto [leader_end, follower_end] = make_memory_pipe();
  FollowerService svc(7, kFree);
  std::optional<std::string> error;
  std::jthread t([&] { error = svc.serve(*follower_end); });
  write_frame(*leader_end, 1, Ping{0});
  auto pong = read_frame(*leader_end);
  EXPECT_EQ(pong.message, Message{Pong{7}});
  write_frame(*leader_end, 2, Pong{0});  // followers never receive Pong
  t.join();
  ASSERT_TRUE(error);
  EXPECT_EQ(svc.stats().protocol_errors.load(), 1u);
}

TEST(Follower, SliceMissIsProtocolError) {
  auto [leader_end, follower_end] = make_memory_pipe();
  FollowerService svc(0, kFree);
  std::optional<std::string> error;
  std::jthread t([&] { error = svc.serve(*follower_end); });
  ExecuteShardsReq req;
  req.block_number = 1;
  req.txns.push_back(pay(0, addr(1), addr(2), 1));
  req.state_slice.at(addr(1)).balance = 5;  // addr(2) missing
  write_frame(*leader_end, 1, req);
  t.join();
  ASSERT_TRUE(error);
}
