#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "shardchain/analyzer.hpp"
#include "shardchain/bench.hpp"
#include "shardchain/codec.hpp"
#include "shardchain/errors.hpp"
#include "shardchain/validation.hpp"
#include "shardchain/workload.hpp"
#include "support.hpp"

using namespace shardchain;
using namespace testing_support;

namespace {

std::size_t contract_calls(const std::vector<Transaction>& block) {
  std::size_t n = 0;
  for (const auto& tx : block) n += tx.is_contract();
  return n;
}

}  // namespace

TEST(Rho, ParseAndCounts) {
  EXPECT_EQ(Rho::parse("1/4"), (Rho{1, 4}));
  EXPECT_EQ(Rho::parse("1/4").str(), "1/4");
  EXPECT_THROW(Rho::parse("1:4"), ConfigError);
  EXPECT_THROW(Rho::parse("0/4"), ConfigError);
  EXPECT_THROW(Rho::parse("1/"), ConfigError);
  EXPECT_EQ((Rho{1, 1}).contract_count(100), 50u);
  EXPECT_EQ((Rho{1, 16}).contract_count(500), 29u);  // 500/17 = 29.4
  EXPECT_EQ((Rho{1, 2}).contract_count(300), 100u);
  EXPECT_EQ((Rho{1, 4}).contract_count(500), 100u);
  EXPECT_EQ((Rho{1, 8}).contract_count(100), 11u);  // 11.1
  EXPECT_EQ((Rho{1, 1}).contract_count(101), 51u);  // 50.5 rounds up
}

TEST(Synthesize, ContractMonetarySplit) {
  for (auto [rho, txns] : {std::pair{Rho{1, 1}, 100u}, std::pair{Rho{1, 16}, 500u}, std::pair{Rho{1, 4}, 300u}}) {
    WorkloadSpec spec;
    spec.rho = rho;
    spec.txns_per_block = txns;
    spec.block_count = 4;
    auto w = synthesize(spec);
    ASSERT_EQ(w.blocks.size(), 4u);
    for (const auto& b : w.blocks) {
      EXPECT_EQ(b.size(), txns);
      EXPECT_EQ(contract_calls(b), rho.contract_count(txns));
    }
  }
}

TEST(Synthesize, DeterministicAndSeedSensitive) {
  WorkloadSpec spec;
  spec.rho = Rho{1, 2};
  spec.txns_per_block = 200;
  spec.block_count = 3;
  auto a = synthesize(spec);
  auto b = synthesize(spec);
  ASSERT_EQ(a.blocks, b.blocks);
  EXPECT_EQ(to_csv(a.blocks), to_csv(b.blocks));
  EXPECT_EQ(state_digest(a.genesis), state_digest(b.genesis));
  spec.seed += 1;
  EXPECT_NE(synthesize(spec).blocks, a.blocks);
}

TEST(Synthesize, BlocksAreStructurallyValid) {
  WorkloadSpec spec;
  spec.rho = Rho{1, 1};
  spec.txns_per_block = 300;
  spec.block_count = 3;
  auto w = synthesize(spec);
  for (std::size_t i = 0; i < w.blocks.size(); ++i) {
    Block b;
    b.number = i + 1;
    b.txns = w.blocks[i];
    EXPECT_FALSE(check_block(b).has_value());
    for (const auto& tx : b.txns) EXPECT_NO_THROW(touched_addresses(tx));
  }
}

TEST(Synthesize, SelectorMixFollowsFrequencies) {
  WorkloadSpec spec;
  spec.rho = Rho{1, 1};
  spec.txns_per_block = 500;
  spec.block_count = 40;
  auto w = synthesize(spec);
  std::map<std::string_view, std::size_t> seen;
  std::size_t total = 0;
  for (const auto& b : w.blocks)
    for (const auto& tx : b)
      if (tx.is_contract()) {
        ++seen[find_function(tx.input)->name];
        ++total;
      }
  std::uint64_t freq_total = 0;
  for (const auto& f : function_registry()) freq_total += f.frequency;
  for (const auto& f : function_registry()) {
    double expected = static_cast<double>(f.frequency) / static_cast<double>(freq_total);
    double got = static_cast<double>(seen[f.name]) / static_cast<double>(total);
    EXPECT_NEAR(got, expected, 0.02) << f.name;
  }
}

TEST(Synthesize, MostMonetaryTransfersSucceed) {
  WorkloadSpec spec;
  spec.rho = Rho{1, 4};
  spec.txns_per_block = 200;
  spec.block_count = 2;
  auto w = synthesize(spec);
  auto r = execute_shard(w.blocks[0], w.genesis, SyntheticCost::zero());
  std::size_t applied = 0, monetary = 0;
  for (std::size_t i = 0; i < r.outcomes.size(); ++i)
    if (!w.blocks[0][i].is_contract()) {
      ++monetary;
      applied += r.outcomes[i].applied();
    }
  EXPECT_EQ(applied, monetary);
}

TEST(Ingest, EmptyFileWithHeader) {
  auto r = ingest_csv_text(std::string(kTxCsvHeader) + "\n");
  EXPECT_TRUE(r.txns.empty());
  EXPECT_EQ(r.skipped_unknown, 0u);
  EXPECT_TRUE(r.errors.empty());
}

TEST(Ingest, TransferRowAndUnknownSelector) {
  const std::string transfer_input = to_hex(encode_call(Function::Transfer, {addr(2), word_from_wei(10)}));
  std::string csv = std::string(kTxCsvHeader) + "\n" + addr(1).hex() + "," + contract_addr(1).hex() + ",0,0x" +
                    transfer_input + ",,46147\n" + addr(1).hex() + "," + contract_addr(1).hex() +
                    ",0,0xdeadbeef00,,46147\n" + addr(3).hex() + "," + addr(4).hex() + ",12345,,,46148\n";
  auto r = ingest_csv_text(csv);
  ASSERT_EQ(r.txns.size(), 2u);
  EXPECT_EQ(find_function(r.txns[0].input)->function, Function::Transfer);
  EXPECT_EQ(r.txns[0].block_number, 46147u);
  EXPECT_EQ(r.txns[1].value, Wei{12345});
  EXPECT_EQ(r.txns[1].tx_id, 0u);
  EXPECT_EQ(r.skipped_unknown, 1u);

  auto coerced = ingest_csv_text(csv, {.coerce_unknown = true});
  ASSERT_EQ(coerced.txns.size(), 3u);
  EXPECT_EQ(coerced.coerced_unknown, 1u);
  EXPECT_FALSE(coerced.txns[1].is_contract());
  EXPECT_EQ(coerced.txns[1].tx_id, 1u);
}

TEST(Ingest, ColumnsByNameAndCreates) {
  std::string csv = "block_number,value,input,from_address,receipt_contract_address,to_address\n7,0,," +
                    addr(1).hex() + "," + contract_addr(3).hex() + ",\n";
  auto r = ingest_csv_text(csv);
  ASSERT_EQ(r.txns.size(), 1u);
  EXPECT_EQ(r.txns[0].to, contract_addr(3));
  EXPECT_EQ(r.txns[0].creates, std::optional<Address>(contract_addr(3)));
}

TEST(Ingest, RowErrorsCollected) {
  std::string csv = std::string(kTxCsvHeader) + "\n0xzz,0x00,1,,,1\n" + addr(1).hex() + "," + addr(2).hex() +
                    ",notanumber,,,1\n" + addr(1).hex() + "," + addr(2).hex() + ",5,,,1\n";
  auto r = ingest_csv_text(csv);
  EXPECT_EQ(r.txns.size(), 1u);
  ASSERT_EQ(r.errors.size(), 2u);
  EXPECT_EQ(r.errors[0].line, 2u);
  EXPECT_EQ(r.errors[1].line, 3u);
}

TEST(Ingest, MissingColumnOrFileIsIoError) {
  EXPECT_THROW(ingest_csv_text("from_address,to_address\n"), IoError);
  EXPECT_THROW(ingest_csv("/nonexistent/file.csv"), IoError);
}

TEST(Ingest, SynthCsvRoundTrip) {
  WorkloadSpec spec;
  spec.rho = Rho{1, 2};
  spec.txns_per_block = 100;
  spec.block_count = 3;
  auto w = synthesize(spec);
  auto path = std::filesystem::temp_directory_path() / "shardchain_roundtrip.csv";
  write_csv(path, w.blocks);
  auto r = ingest_csv(path);
  std::filesystem::remove(path);
  EXPECT_TRUE(r.errors.empty());
  EXPECT_EQ(group_by_block(r.txns), w.blocks);
}

TEST(BenchConfig, ParsesKeys) {
  auto c = parse_config(R"(
    # comment
    role = leader
    followers = 127.0.0.1:7001, 127.0.0.1:7002
    target = 0x0000100000000000000000000000000000000000000000000000000000000000
    rho = 1/1, 1/16
    txns_per_block = 100,500
    seed = 9
    deps = from-to-only
    emit_hints = false
    contract_us = 70
    monetary_us = 3
    cost_mode = sleep
    phases = exec+pow
    validators = sharing
  )");
  EXPECT_EQ(c.followers.size(), 2u);
  EXPECT_EQ(c.followers[1].port, 7002);
  EXPECT_EQ(c.target, Target::pow2(236));
  EXPECT_EQ(c.rhos, (std::vector<Rho>{{1, 1}, {1, 16}}));
  EXPECT_EQ(c.txns_per_block, (std::vector<std::size_t>{100, 500}));
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.deps, DepsMode::FromToOnly);
  EXPECT_FALSE(c.emit_hints);
  EXPECT_EQ(c.cost.contract.count(), 70);
  EXPECT_EQ(c.cost.mode, CostMode::Sleep);
  EXPECT_EQ(c.phases, std::vector<Phase>{Phase::ExecPow});
  EXPECT_FALSE(c.validate_serial);
  EXPECT_TRUE(c.validate_sharing);
}

TEST(BenchConfig, Errors) {
  EXPECT_THROW(parse_config("bogus = 1"), ConfigError);
  EXPECT_THROW(parse_config("rho"), ConfigError);
  EXPECT_THROW(parse_config("seed = -1"), ConfigError);
  EXPECT_THROW(parse_config("followers = nope"), ConfigError);
  EXPECT_THROW(parse_config("target = 0"), ConfigError);
  EXPECT_THROW(parse_config("txns_per_block ="), ConfigError);
}

namespace {

BenchConfig tiny_config() {
  BenchConfig c;
  c.rhos = {Rho{1, 4}};
  c.txns_per_block = {40};
  c.blocks = 3;
  c.warmup = 1;
  c.follower_counts = {1, 2, 3, 4, 5};
  c.cost = SyntheticCost::zero();
  return c;
}

}  // namespace

TEST(RunBenchmark, RecordsAndInvariants) {
  auto records = run_benchmark(tiny_config());
  // serial miner + serial validator, then miner + two validators per F.
  ASSERT_EQ(records.size(), 2u + 5 * 3);
  for (const auto& r : records) {
    EXPECT_EQ(r.samples.size(), 3u);
    EXPECT_TRUE(r.all_accepted);
    if (r.mode == "serial") EXPECT_EQ(r.speedup, 1.0);
    else EXPECT_GT(r.speedup, 0.0);
    EXPECT_NEAR(r.throughput_tps * r.exec_time_ms.mean / 1000.0, 40.0, 1e-9);
    if (r.mode == "community") {
      EXPECT_EQ(r.samples[0].per_follower_txn_counts.size(), r.followers);
      EXPECT_GT(r.shard_count.mean, 0.0);
    }
  }
  EXPECT_EQ(records.front().config_id, "data-1-4-40");
}

TEST(Report, SamplesRoundTripExactly) {
  auto records = run_benchmark(tiny_config());
  auto back = records_from_samples_csv(samples_to_csv(records));
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(back[i].config_id, records[i].config_id);
    EXPECT_EQ(back[i].role, records[i].role);
    EXPECT_EQ(back[i].exec_time_ms, records[i].exec_time_ms);
    EXPECT_EQ(back[i].analyze_time_us, records[i].analyze_time_us);
    EXPECT_EQ(back[i].e2e_mine_time_ms, records[i].e2e_mine_time_ms);
    EXPECT_EQ(back[i].shard_count, records[i].shard_count);
    EXPECT_EQ(back[i].max_shard_size, records[i].max_shard_size);
    EXPECT_EQ(back[i].per_follower_txns, records[i].per_follower_txns);
    EXPECT_EQ(back[i].speedup, records[i].speedup);
    EXPECT_EQ(back[i].throughput_tps, records[i].throughput_tps);
  }
  for (const auto& family : metric_families())
    EXPECT_EQ(render_family(back, family, ReportFormat::Csv), render_family(records, family, ReportFormat::Csv));
}

TEST(Report, SingleRecordCsv) {
  BenchmarkRecord r;
  r.config_id = "data-1-1-100";
  r.rho = Rho{1, 1};
  r.txns_per_block = 100;
  r.mode = "serial";
  r.phase = "exec";
  r.role = "miner";
  r.samples.push_back(BlockSample{1, 100, 2.5, 0, 2.5, 0, 0, {}, true});
  compute_aggregates(r);
  std::vector<BenchmarkRecord> records{r};
  compute_speedups(records);
  auto csv = render_family(records, "exec_time", ReportFormat::Csv);
  EXPECT_EQ(csv,
            "config_id,rho,txns_per_block,mode,followers,phase,role,blocks,mean,stddev\n"
            "data-1-1-100,1/1,100,serial,0,exec,miner,1,2.5,0\n");
  auto tsv = render_family(records, "exec_time", ReportFormat::Tsv);
  EXPECT_NE(tsv.find("config_id\trho\t"), std::string::npos);
}

TEST(Report, SpeedupSeriesKeyedByFollowerCount) {
  auto c = tiny_config();
  c.include_serial = false;
  c.validate_default = c.validate_sharing = false;
  auto records = run_benchmark(c);
  auto plot = render_family(records, "speedup", ReportFormat::PlotData);
  std::set<std::string> series;
  std::istringstream in(plot);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line, "x\tseries\ty");
  while (std::getline(in, line)) {
    auto first = line.find('\t');
    auto second = line.find('\t', first + 1);
    series.insert(line.substr(first + 1, second - first - 1));
  }
  EXPECT_EQ(series, (std::set<std::string>{"F=1", "F=2", "F=3", "F=4", "F=5"}));
}

TEST(Report, EmitWritesEveryFamily) {
  auto records = run_benchmark(tiny_config());
  auto dir = std::filesystem::temp_directory_path() / "shardchain_report_test";
  std::filesystem::remove_all(dir);
  auto paths = emit_report(records, ReportFormat::PlotData, dir);
  EXPECT_EQ(paths.size(), metric_families().size());
  for (const auto& p : paths) EXPECT_TRUE(std::filesystem::exists(p));
  std::filesystem::remove_all(dir);
  EXPECT_THROW(emit_report({}, ReportFormat::Csv, dir), ConfigError);
}
