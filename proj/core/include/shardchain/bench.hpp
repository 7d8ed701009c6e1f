#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shardchain/analyzer.hpp"
#include "shardchain/engine.hpp"
#include "shardchain/pow.hpp"
#include "shardchain/transport.hpp"
#include "shardchain/workload.hpp"

namespace shardchain {

enum class Phase { ExecOnly, ExecPow };

const char* to_string(Phase p);

/// Parsed from a key = value file; '#' starts a comment. List values are
/// comma separated.
struct BenchConfig {
  std::string role = "leader";
  /// Remote followers (multi-machine mode). Empty means the in-process harness.
  std::vector<Endpoint> followers;
  /// Community sizes to measure with the in-process harness.
  std::vector<std::size_t> follower_counts{1, 2, 3, 4, 5};
  bool include_serial = true;
  Target target = Target::pow2(236);
  std::vector<Rho> rhos{Rho{1, 1}, Rho{1, 2}, Rho{1, 4}, Rho{1, 8}, Rho{1, 16}};
  std::vector<std::size_t> txns_per_block{100, 200, 300, 400, 500};
  std::size_t blocks = 30;
  std::size_t warmup = 5;
  std::uint64_t seed = 42;
  DepsMode deps = DepsMode::Full;
  bool emit_hints = true;
  SyntheticCost cost{};
  std::vector<Phase> phases{Phase::ExecOnly};
  bool validate_serial = true;
  bool validate_default = true;
  bool validate_sharing = true;
  double zipf_skew = 1.1;
  double zipf_offset = 100;
  std::size_t user_pool = 0;
  std::size_t contract_pool = 0;
  std::string out_dir = "results";
};

BenchConfig parse_config(const std::string& text);
BenchConfig load_config(const std::filesystem::path& path);

struct BlockSample {
  std::uint64_t block_number = 0;
  std::size_t txns = 0;
  double exec_time_ms = 0;
  double analyze_time_us = 0;
  double e2e_mine_time_ms = 0;
  std::size_t shard_count = 0;
  std::size_t max_shard_size = 0;
  std::vector<std::size_t> per_follower_txn_counts;
  bool accepted = true;
};

struct Aggregate {
  double mean = 0;
  double stddev = 0;
  bool operator==(const Aggregate&) const = default;
};

Aggregate aggregate(const std::vector<double>& values);

/// One measured cell: a workload, a mode (serial or community of F
/// followers), a phase and a role (miner or one validator kind).
struct BenchmarkRecord {
  std::string config_id;
  Rho rho;
  std::size_t txns_per_block = 0;
  std::string mode;  // "serial" | "community"
  std::size_t followers = 0;
  std::string phase;
  std::string role;  // "miner" | "validator-serial" | "validator-default" | "validator-sharing"
  std::vector<BlockSample> samples;

  Aggregate exec_time_ms;
  Aggregate analyze_time_us;
  Aggregate e2e_mine_time_ms;
  Aggregate shard_count;
  Aggregate max_shard_size;
  Aggregate per_follower_txns;
  bool all_accepted = true;
  /// Serial mean exec time over this record's mean, same workload and role family.
  double speedup = 0;
  /// txns_per_block / mean exec time in seconds.
  double throughput_tps = 0;
};

/// Recomputes every aggregate from `samples` (speedup excepted).
void compute_aggregates(BenchmarkRecord& record);
/// Fills speedup by pairing each record with its serial baseline.
void compute_speedups(std::vector<BenchmarkRecord>& records);

/// Label in the data-<contract>-<monetary>-<txns> style.
std::string config_id(const Rho& rho, std::size_t txns);

class BenchmarkFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Runs every (workload, mode, phase) cell. Every honest block must be
/// accepted by each requested validator and every community run must
/// reproduce the serial state digests; otherwise BenchmarkFailure.
std::vector<BenchmarkRecord> run_benchmark(const BenchConfig& config, const ProgressFn& progress = {});

enum class ReportFormat { Csv, Tsv, PlotData };

ReportFormat parse_report_format(const std::string& text);

/// Per-block samples for every record; the input of `bench report`.
std::string samples_to_csv(const std::vector<BenchmarkRecord>& records);
/// Inverse of samples_to_csv; aggregates and speedups are recomputed.
std::vector<BenchmarkRecord> records_from_samples_csv(const std::string& text);

/// The metric families, in file order.
const std::vector<std::string>& metric_families();

/// Body of one family file.
std::string render_family(const std::vector<BenchmarkRecord>& records, const std::string& family, ReportFormat format);

/// Writes one file per metric family into `dir`; returns the paths.
std::vector<std::filesystem::path> emit_report(const std::vector<BenchmarkRecord>& records, ReportFormat format,
                                               const std::filesystem::path& dir);

}  // namespace shardchain
