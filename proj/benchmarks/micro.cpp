#include <benchmark/benchmark.h>

#include "shardchain/analyzer.hpp"
#include "shardchain/codec.hpp"
#include "shardchain/engine.hpp"
#include "shardchain/leader.hpp"
#include "shardchain/pow.hpp"
#include "shardchain/wire.hpp"
#include "shardchain/workload.hpp"

using namespace shardchain;

namespace {

Workload workload(std::size_t txns) {
  WorkloadSpec spec;
  spec.rho = Rho{1, 4};
  spec.txns_per_block = txns;
  spec.block_count = 1;
  return synthesize(spec);
}

void BM_Analyze(benchmark::State& state) {
  auto w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(analyze(w.blocks[0]));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Analyze)->Arg(100)->Arg(500);

void BM_LoadBalance(benchmark::State& state) {
  auto w = workload(500);
  auto a = analyze(w.blocks[0]);
  std::vector<FollowerId> followers;
  for (FollowerId f = 0; f < state.range(0); ++f) followers.push_back(f);
  for (auto _ : state) benchmark::DoNotOptimize(load_balance(a.shards, followers, w.blocks[0]));
}
BENCHMARK(BM_LoadBalance)->Arg(1)->Arg(5);

void BM_ExecuteBlock(benchmark::State& state) {
  auto w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(execute_shard(w.blocks[0], w.genesis, SyntheticCost::zero()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExecuteBlock)->Arg(100)->Arg(500);

void BM_StateDigest(benchmark::State& state) {
  auto w = workload(500);
  for (auto _ : state) benchmark::DoNotOptimize(state_digest(w.genesis));
}
BENCHMARK(BM_StateDigest);

void BM_NonceHash(benchmark::State& state) {
  auto w = workload(500);
  Block b;
  b.number = 1;
  b.txns = w.blocks[0];
  NonceHasher hasher(b);
  std::uint64_t nonce = 0;
  for (auto _ : state) benchmark::DoNotOptimize(hasher.hash(nonce++));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NonceHash);

void BM_FrameRoundTrip(benchmark::State& state) {
  auto w = workload(500);
  auto a = analyze(w.blocks[0]);
  auto asg = load_balance(a.shards, {0}, w.blocks[0]);
  std::set<Address> addrs;
  for (const auto& tx : asg.per_follower[0].txns)
    for (const auto& x : touched_addresses_lenient(tx)) addrs.insert(x);
  ExecuteShardsReq req{1, asg.per_follower[0].txns, w.genesis.slice(addrs)};
  for (auto _ : state) {
    auto bytes = encode_frame(7, req);
    benchmark::DoNotOptimize(parse_frame(bytes));
    state.SetBytesProcessed(state.bytes_processed() + static_cast<std::int64_t>(bytes.size()));
  }
}
BENCHMARK(BM_FrameRoundTrip);

}  // namespace

BENCHMARK_MAIN();
