// bench: workload synthesis, CSV ingest, benchmark runs and reports.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "shardchain/analyzer.hpp"
#include "shardchain/bench.hpp"
#include "shardchain/errors.hpp"
#include "shardchain/follower.hpp"
#include "shardchain/transport.hpp"
#include "shardchain/workload.hpp"

namespace sc = shardchain;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sc::IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_summary(const std::vector<sc::BenchmarkRecord>& records) {
  std::printf("%-16s %-6s %-9s %-4s %-26s %7s %12s %9s %8s %12s\n", "config", "rho", "mode", "F", "role", "blocks",
              "exec_ms", "speedup", "shards", "tps");
  for (const auto& r : records) {
    std::printf("%-16s %-6s %-9s %-4zu %-26s %7zu %12.3f %9.3f %8.1f %12.1f\n", r.config_id.c_str(),
                r.rho.str().c_str(), r.mode.c_str(), r.followers, (r.role + "/" + r.phase).c_str(), r.samples.size(),
                r.exec_time_ms.mean, r.speedup, r.shard_count.mean, r.throughput_tps);
  }
}

int cmd_run(const std::string& config_path, const std::string& out_override, const std::string& format) {
  auto config = sc::load_config(config_path);
  if (config.role == "follower")
    throw sc::ConfigError("role = follower: start followers with `bench follower --listen host:port`");
  const std::string out_dir = out_override.empty() ? config.out_dir : out_override;
  auto records = sc::run_benchmark(config, [](const std::string& msg) { std::cerr << "[bench] " << msg << "\n"; });
  std::filesystem::create_directories(out_dir);
  const auto samples_path = std::filesystem::path(out_dir) / "samples.csv";
  std::ofstream(samples_path, std::ios::binary) << sc::samples_to_csv(records);
  auto paths = sc::emit_report(records, sc::parse_report_format(format), out_dir);
  print_summary(records);
  std::cerr << "[bench] wrote " << samples_path.string() << " and " << paths.size() << " report files\n";
  return 0;
}

int cmd_synth(const std::string& rho, std::size_t txns, std::size_t blocks, std::uint64_t seed,
              const std::string& out) {
  sc::WorkloadSpec spec;
  spec.rho = sc::Rho::parse(rho);
  spec.txns_per_block = txns;
  spec.block_count = blocks;
  spec.seed = seed;
  auto w = sc::synthesize(spec);
  sc::write_csv(out, w.blocks);
  std::printf("wrote %zu blocks x %zu txns (%zu contract calls each) to %s\n", blocks, txns,
              spec.rho.contract_count(txns), out.c_str());
  return 0;
}

int cmd_ingest(const std::string& path, bool coerce) {
  auto result = sc::ingest_csv(path, sc::IngestOptions{coerce});
  auto blocks = sc::group_by_block(result.txns);
  std::size_t contract = 0;
  for (const auto& tx : result.txns) contract += tx.is_contract();
  std::printf("transactions: %zu (%zu contract, %zu monetary) in %zu blocks\n", result.txns.size(), contract,
              result.txns.size() - contract, blocks.size());
  std::printf("skipped unknown selector: %zu, coerced: %zu, row errors: %zu\n", result.skipped_unknown,
              result.coerced_unknown, result.errors.size());
  for (std::size_t i = 0; i < result.errors.size() && i < 10; ++i)
    std::printf("  line %zu: %s\n", result.errors[i].line, result.errors[i].message.c_str());
  for (const auto& b : blocks) {
    auto st = sc::shard_stats(sc::analyze(b));
    std::printf("block %llu: %zu txns, %zu shards, largest %zu\n",
                static_cast<unsigned long long>(b.front().block_number), b.size(), st.shard_count,
                st.max_shard_size);
  }
  return result.errors.empty() ? 0 : 2;
}

int cmd_report(const std::string& path, const std::string& format, const std::string& out_dir) {
  auto records = sc::records_from_samples_csv(read_file(path));
  if (records.empty()) throw sc::ConfigError("no records in " + path);
  auto paths = sc::emit_report(records, sc::parse_report_format(format), out_dir);
  for (const auto& p : paths) std::printf("%s\n", p.string().c_str());
  return 0;
}

int cmd_follower(const std::string& listen, std::uint32_t id, const sc::SyntheticCost& cost) {
  sc::TcpListener listener(sc::Endpoint::parse(listen));
  std::cerr << "[follower " << id << "] listening on port " << listener.port() << "\n";
  for (;;) {
    auto stream = listener.accept();
    std::thread([stream = std::move(stream), id, cost]() mutable {
      sc::FollowerService service(id, cost);
      if (auto err = service.serve(*stream)) std::cerr << "[follower " << id << "] " << *err << "\n";
      else std::cerr << "[follower " << id << "] leader disconnected\n";
    }).detach();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharded block execution: workloads, benchmarks and reports"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format = "csv";
  auto* run = app.add_subcommand("run", "Run a benchmark from a config file");
  run->add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides out_dir)");
  run->add_option("--format", format, "csv, tsv or plotdata")->check(CLI::IsMember({"csv", "tsv", "plotdata"}));

  std::string rho = "1/1", synth_out;
  std::size_t txns = 100, blocks = 10;
  std::uint64_t seed = 42;
  auto* synth = app.add_subcommand("synth", "Write a synthetic workload as transaction CSV");
  synth->add_option("--rho", rho, "contract/monetary ratio, e.g. 1/4");
  synth->add_option("--txns", txns, "transactions per block")->check(CLI::PositiveNumber);
  synth->add_option("--blocks", blocks, "number of blocks")->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--out", synth_out, "output CSV")->required();

  std::string ingest_path;
  bool coerce = false;
  auto* ingest = app.add_subcommand("ingest", "Parse a transaction CSV and print shard statistics");
  ingest->add_option("csv", ingest_path)->required()->check(CLI::ExistingFile);
  ingest->add_flag("--coerce-unknown", coerce, "keep unknown calls as plain transfers");

  std::string records_path, report_format = "csv", report_out = "report";
  auto* report = app.add_subcommand("report", "Emit metric files from a samples CSV");
  report->add_option("records", records_path)->required()->check(CLI::ExistingFile);
  report->add_option("--format", report_format)->check(CLI::IsMember({"csv", "tsv", "plotdata"}));
  report->add_option("--out", report_out, "output directory");

  std::string listen;
  std::uint32_t follower_id = 0;
  unsigned contract_us = 50, monetary_us = 5;
  std::string cost_mode = "spin";
  auto* follower = app.add_subcommand("follower", "Serve the follower protocol over TCP");
  follower->add_option("--listen", listen, "host:port")->required();
  follower->add_option("--id", follower_id);
  follower->add_option("--contract-us", contract_us);
  follower->add_option("--monetary-us", monetary_us);
  follower->add_option("--cost-mode", cost_mode)->check(CLI::IsMember({"spin", "sleep"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, out_dir, format);
    if (*synth) return cmd_synth(rho, txns, blocks, seed, synth_out);
    if (*ingest) return cmd_ingest(ingest_path, coerce);
    if (*report) return cmd_report(records_path, report_format, report_out);
    if (*follower) {
      sc::SyntheticCost cost;
      cost.contract = std::chrono::microseconds(contract_us);
      cost.monetary = std::chrono::microseconds(monetary_us);
      cost.mode = cost_mode == "sleep" ? sc::CostMode::Sleep : sc::CostMode::Spin;
      return cmd_follower(listen, follower_id, cost);
    }
  } catch (const sc::BenchmarkFailure& e) {
    std::cerr << "bench: correctness failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
