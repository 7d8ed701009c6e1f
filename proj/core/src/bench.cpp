#include "shardchain/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <memory>
#include <sstream>
#include <tuple>

#include "shardchain/chain.hpp"
#include "shardchain/cluster.hpp"
#include "shardchain/codec.hpp"
#include "shardchain/errors.hpp"
#include "shardchain/roles.hpp"

namespace shardchain {

const char* to_string(Phase p) { return p == Phase::ExecOnly ? "exec" : "exec+pow"; }

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  for (auto& item : split(value, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    auto v = std::stoull(text, &used);
    if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + text + "'");
  }
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    auto v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

BenchConfig parse_config(const std::string& text) {
  BenchConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    try {
      if (key == "role") {
        if (value != "leader" && value != "follower") throw ConfigError("role: expected leader or follower");
        c.role = value;
      } else if (key == "followers") {
        c.followers.clear();
        for (auto& ep : split_list(value)) c.followers.push_back(Endpoint::parse(ep));
      } else if (key == "follower_counts") {
        c.follower_counts.clear();
        for (auto& v : split_list(value)) {
          auto n = parse_u64(key, v);
          if (n == 0) throw ConfigError("follower_counts: counts must be positive");
          c.follower_counts.push_back(n);
        }
      } else if (key == "include_serial") {
        c.include_serial = parse_bool(key, value);
      } else if (key == "target") {
        c.target = Target::parse(value);
      } else if (key == "target_exponent") {
        auto e = parse_u64(key, value);
        if (e > 255) throw ConfigError("target_exponent: must be at most 255");
        c.target = Target::pow2(static_cast<unsigned>(e));
      } else if (key == "rho") {
        c.rhos.clear();
        for (auto& v : split_list(value)) c.rhos.push_back(Rho::parse(v));
      } else if (key == "txns_per_block") {
        c.txns_per_block.clear();
        for (auto& v : split_list(value)) {
          auto n = parse_u64(key, v);
          if (n == 0) throw ConfigError("txns_per_block: sizes must be positive");
          c.txns_per_block.push_back(n);
        }
      } else if (key == "blocks") {
        c.blocks = parse_u64(key, value);
        if (c.blocks == 0) throw ConfigError("blocks: must be positive");
      } else if (key == "warmup") {
        c.warmup = parse_u64(key, value);
      } else if (key == "seed") {
        c.seed = parse_u64(key, value);
      } else if (key == "deps") {
        if (value == "full") c.deps = DepsMode::Full;
        else if (value == "from-to-only") c.deps = DepsMode::FromToOnly;
        else throw ConfigError("deps: expected full or from-to-only");
      } else if (key == "emit_hints") {
        c.emit_hints = parse_bool(key, value);
      } else if (key == "contract_us") {
        c.cost.contract = std::chrono::microseconds(parse_u64(key, value));
      } else if (key == "monetary_us") {
        c.cost.monetary = std::chrono::microseconds(parse_u64(key, value));
      } else if (key == "cost_mode") {
        if (value == "spin") c.cost.mode = CostMode::Spin;
        else if (value == "sleep") c.cost.mode = CostMode::Sleep;
        else throw ConfigError("cost_mode: expected spin or sleep");
      } else if (key == "phases") {
        c.phases.clear();
        for (auto& v : split_list(value)) {
          if (v == "exec") c.phases.push_back(Phase::ExecOnly);
          else if (v == "exec+pow") c.phases.push_back(Phase::ExecPow);
          else throw ConfigError("phases: expected exec or exec+pow, got '" + v + "'");
        }
      } else if (key == "validators") {
        c.validate_serial = c.validate_default = c.validate_sharing = false;
        for (auto& v : split_list(value)) {
          if (v == "serial") c.validate_serial = true;
          else if (v == "default") c.validate_default = true;
          else if (v == "sharing") c.validate_sharing = true;
          else throw ConfigError("validators: unknown validator '" + v + "'");
        }
      } else if (key == "zipf_skew") {
        c.zipf_skew = parse_double(key, value);
        if (!(c.zipf_skew >= 0)) throw ConfigError("zipf_skew: must be non-negative");
      } else if (key == "zipf_offset") {
        c.zipf_offset = parse_double(key, value);
        if (!(c.zipf_offset >= 0)) throw ConfigError("zipf_offset: must be non-negative");
      } else if (key == "user_pool") {
        c.user_pool = parse_u64(key, value);
      } else if (key == "contract_pool") {
        c.contract_pool = parse_u64(key, value);
      } else if (key == "out_dir") {
        c.out_dir = value;
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + key + ": " + e.what());
    }
  }
  if (c.rhos.empty()) throw ConfigError("rho: at least one ratio required");
  if (c.txns_per_block.empty()) throw ConfigError("txns_per_block: at least one size required");
  if (c.phases.empty()) throw ConfigError("phases: at least one phase required");
  return c;
}

BenchConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  double sum = 0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0;
    for (double v : values) sq += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return a;
}

void compute_aggregates(BenchmarkRecord& r) {
  std::vector<double> exec, analyze, e2e, shards, largest, per_follower;
  r.all_accepted = true;
  for (const auto& s : r.samples) {
    exec.push_back(s.exec_time_ms);
    analyze.push_back(s.analyze_time_us);
    e2e.push_back(s.e2e_mine_time_ms);
    shards.push_back(static_cast<double>(s.shard_count));
    largest.push_back(static_cast<double>(s.max_shard_size));
    for (auto n : s.per_follower_txn_counts) per_follower.push_back(static_cast<double>(n));
    r.all_accepted = r.all_accepted && s.accepted;
  }
  r.exec_time_ms = aggregate(exec);
  r.analyze_time_us = aggregate(analyze);
  r.e2e_mine_time_ms = aggregate(e2e);
  r.shard_count = aggregate(shards);
  r.max_shard_size = aggregate(largest);
  r.per_follower_txns = aggregate(per_follower);
  r.throughput_tps = r.exec_time_ms.mean > 0
                         ? static_cast<double>(r.txns_per_block) / (r.exec_time_ms.mean / 1000.0)
                         : 0.0;
}

void compute_speedups(std::vector<BenchmarkRecord>& records) {
  auto baseline_role = [](const std::string& role) {
    return role == "miner" ? std::string("miner") : std::string("validator-serial");
  };
  for (auto& r : records) {
    r.speedup = 0;
    if (r.mode == "serial") {
      r.speedup = 1.0;
      continue;
    }
    for (const auto& base : records) {
      if (base.mode == "serial" && base.config_id == r.config_id && base.phase == r.phase &&
          base.role == baseline_role(r.role) && r.exec_time_ms.mean > 0) {
        r.speedup = base.exec_time_ms.mean / r.exec_time_ms.mean;
        break;
      }
    }
  }
}

std::string config_id(const Rho& rho, std::size_t txns) {
  return "data-" + std::to_string(rho.contract) + "-" + std::to_string(rho.monetary) + "-" + std::to_string(txns);
}

namespace {

const Address kBenchMiner = Address::from_index(1, 0xee);

BenchmarkRecord make_record(const Rho& rho, std::size_t txns, const std::string& mode, std::size_t followers,
                            Phase phase, const std::string& role) {
  BenchmarkRecord r;
  r.config_id = config_id(rho, txns);
  r.rho = rho;
  r.txns_per_block = txns;
  r.mode = mode;
  r.followers = followers;
  r.phase = to_string(phase);
  r.role = role;
  return r;
}

BlockSample sample_from(std::uint64_t number, std::size_t txns, const BlockTimings& t,
                        const std::optional<ShardStats>& shards, bool accepted) {
  BlockSample s;
  s.block_number = number;
  s.txns = txns;
  s.exec_time_ms = t.exec_ms + t.analyze_us / 1000.0;
  s.analyze_time_us = t.analyze_us;
  s.e2e_mine_time_ms = t.total_ms;
  if (shards) {
    s.shard_count = shards->shard_count;
    s.max_shard_size = shards->max_shard_size;
    s.per_follower_txn_counts = shards->per_follower_counts;
  }
  s.accepted = accepted;
  return s;
}

void require_accept(const Verdict& v, ValidatorMode mode, const std::string& where) {
  if (!v.accepted())
    throw BenchmarkFailure(where + ": " + to_string(mode) + " validator rejected an honest block (" +
                           to_string(v.reason) + ": " + v.detail + ")");
  if (v.fell_back_to_serial)
    throw BenchmarkFailure(where + ": " + to_string(mode) + " validator fell back to serial execution");
}

struct CommunityHandle {
  std::unique_ptr<LocalCluster> cluster;
  std::unique_ptr<Community> remote;
  Community& get() { return cluster ? cluster->community() : *remote; }
};

}  // namespace

std::vector<BenchmarkRecord> run_benchmark(const BenchConfig& config, const ProgressFn& progress) {
  auto say = [&](const std::string& msg) {
    if (progress) progress(msg);
  };

  std::vector<std::size_t> community_sizes = config.follower_counts;
  if (!config.followers.empty()) community_sizes = {config.followers.size()};

  std::vector<BenchmarkRecord> records;
  for (const auto& rho : config.rhos) {
    for (auto txns : config.txns_per_block) {
      WorkloadSpec spec;
      spec.rho = rho;
      spec.txns_per_block = txns;
      spec.block_count = config.warmup + config.blocks;
      spec.seed = config.seed;
      spec.user_pool = config.user_pool;
      spec.contract_pool = config.contract_pool;
      spec.zipf_skew = config.zipf_skew;
      spec.zipf_offset = config.zipf_offset;
      const Workload workload = synthesize(spec);
      const std::string id = config_id(rho, txns);

      for (auto phase : config.phases) {
        const Target target = phase == Phase::ExecOnly ? Target::max() : config.target;

        // Serial baseline; its digests are the reference for every community run.
        std::vector<Hash256> reference;
        {
          say(id + " " + to_string(phase) + " serial");
          auto miner = make_record(rho, txns, "serial", 0, phase, "miner");
          auto validator = make_record(rho, txns, "serial", 0, phase, "validator-serial");
          PipelineOptions vopts;
          vopts.deps = config.deps;
          vopts.cost = config.cost;
          LocalChain chain(workload.genesis);
          for (std::size_t i = 0; i < workload.blocks.size(); ++i) {
            auto candidate = create_block(workload.blocks[i], {}, chain, kBenchMiner, i + 1);
            auto sealed = mine_block_serial(std::move(candidate), chain, target, config.cost);
            reference.push_back(sealed.block.state_digest);
            const bool measured = i >= config.warmup;
            if (config.validate_serial) {
              auto v = validate_block(sealed.block, chain, ValidatorMode::Serial, nullptr, target, vopts);
              require_accept(v, ValidatorMode::Serial, id + " block " + std::to_string(sealed.block.number));
              if (measured) validator.samples.push_back(sample_from(sealed.block.number, txns, v.timings, v.shards, true));
            }
            if (measured) miner.samples.push_back(sample_from(sealed.block.number, txns, sealed.timings, sealed.shards, true));
            chain.append(std::move(sealed.block), std::move(sealed.post_state));
          }
          if (config.include_serial) {
            records.push_back(std::move(miner));
            if (config.validate_serial) records.push_back(std::move(validator));
          }
        }

        for (auto followers : community_sizes) {
          say(id + " " + to_string(phase) + " community F=" + std::to_string(followers));
          CommunityHandle handle;
          if (config.followers.empty()) {
            handle.cluster = std::make_unique<LocalCluster>(followers, config.cost);
          } else {
            std::vector<Community::Member> members;
            for (std::size_t k = 0; k < config.followers.size(); ++k)
              members.push_back({static_cast<FollowerId>(k), connect_tcp(config.followers[k])});
            handle.remote = std::make_unique<Community>(std::move(members));
          }
          Community& community = handle.get();

          PipelineOptions opts;
          opts.deps = config.deps;
          opts.emit_hints = config.emit_hints;
          opts.cost = config.cost;
          auto miner = make_record(rho, txns, "community", followers, phase, "miner");
          auto vdefault = make_record(rho, txns, "community", followers, phase, "validator-default");
          auto vsharing = make_record(rho, txns, "community", followers, phase, "validator-sharing");
          LocalChain chain(workload.genesis);
          for (std::size_t i = 0; i < workload.blocks.size(); ++i) {
            auto candidate = create_block(workload.blocks[i], {}, chain, kBenchMiner, i + 1);
            auto sealed = mine_block_community(std::move(candidate), chain, target, community, opts);
            const std::string where = id + " F=" + std::to_string(followers) + " block " +
                                      std::to_string(sealed.block.number);
            if (sealed.block.state_digest != reference[i])
              throw BenchmarkFailure(where + ": community state digest differs from serial execution");
            const bool measured = i >= config.warmup;
            if (config.validate_default) {
              auto v = validate_block(sealed.block, chain, ValidatorMode::Default, &community, target, opts);
              require_accept(v, ValidatorMode::Default, where);
              if (measured) vdefault.samples.push_back(sample_from(sealed.block.number, txns, v.timings, v.shards, true));
            }
            if (config.validate_sharing) {
              auto v = validate_block(sealed.block, chain, ValidatorMode::Sharing, &community, target, opts);
              require_accept(v, ValidatorMode::Sharing, where);
              if (measured) vsharing.samples.push_back(sample_from(sealed.block.number, txns, v.timings, v.shards, true));
            }
            if (measured) miner.samples.push_back(sample_from(sealed.block.number, txns, sealed.timings, sealed.shards, true));
            chain.append(std::move(sealed.block), std::move(sealed.post_state));
          }
          records.push_back(std::move(miner));
          if (config.validate_default) records.push_back(std::move(vdefault));
          if (config.validate_sharing) records.push_back(std::move(vsharing));
        }
      }
    }
  }
  for (auto& r : records) compute_aggregates(r);
  compute_speedups(records);
  return records;
}

ReportFormat parse_report_format(const std::string& text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "tsv") return ReportFormat::Tsv;
  if (text == "plotdata") return ReportFormat::PlotData;
  throw ConfigError("unknown report format '" + text + "' (csv, tsv, plotdata)");
}

namespace {

constexpr const char* kSamplesHeader =
    "config_id,rho,txns_per_block,mode,followers,phase,role,block_number,txns,exec_time_ms,analyze_time_us,"
    "e2e_mine_time_ms,shard_count,max_shard_size,per_follower_txn_counts,accepted";

}  // namespace

std::string samples_to_csv(const std::vector<BenchmarkRecord>& records) {
  std::string out = std::string(kSamplesHeader) + "\n";
  for (const auto& r : records) {
    for (const auto& s : r.samples) {
      std::string counts;
      for (std::size_t k = 0; k < s.per_follower_txn_counts.size(); ++k) {
        if (k) counts += ';';
        counts += std::to_string(s.per_follower_txn_counts[k]);
      }
      out += r.config_id + ',' + r.rho.str() + ',' + std::to_string(r.txns_per_block) + ',' + r.mode + ',' +
             std::to_string(r.followers) + ',' + r.phase + ',' + r.role + ',' + std::to_string(s.block_number) +
             ',' + std::to_string(s.txns) + ',' + num(s.exec_time_ms) + ',' + num(s.analyze_time_us) + ',' +
             num(s.e2e_mine_time_ms) + ',' + std::to_string(s.shard_count) + ',' + std::to_string(s.max_shard_size) +
             ',' + counts + ',' + (s.accepted ? "1" : "0") + '\n';
    }
  }
  return out;
}

std::vector<BenchmarkRecord> records_from_samples_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kSamplesHeader)
    throw ConfigError("samples file: missing or unexpected header");
  std::vector<BenchmarkRecord> records;
  std::map<std::tuple<std::string, std::string, std::size_t, std::string>, std::size_t> index;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto f = split(trim(line), ',');
    const std::string where = "samples line " + std::to_string(lineno);
    if (f.size() != 16) throw ConfigError(where + ": expected 16 fields");
    try {
      auto txns_per_block = parse_u64("txns_per_block", f[2]);
      auto followers = parse_u64("followers", f[4]);
      auto key = std::make_tuple(f[0] + '|' + f[1] + '|' + f[2], f[3] + '|' + f[5], followers, f[6]);
      auto [it, fresh] = index.try_emplace(key, records.size());
      if (fresh) {
        BenchmarkRecord r;
        r.config_id = f[0];
        r.rho = Rho::parse(f[1]);
        r.txns_per_block = txns_per_block;
        r.mode = f[3];
        r.followers = followers;
        r.phase = f[5];
        r.role = f[6];
        records.push_back(std::move(r));
      }
      BlockSample s;
      s.block_number = parse_u64("block_number", f[7]);
      s.txns = parse_u64("txns", f[8]);
      s.exec_time_ms = parse_double("exec_time_ms", f[9]);
      s.analyze_time_us = parse_double("analyze_time_us", f[10]);
      s.e2e_mine_time_ms = parse_double("e2e_mine_time_ms", f[11]);
      s.shard_count = parse_u64("shard_count", f[12]);
      s.max_shard_size = parse_u64("max_shard_size", f[13]);
      if (!f[14].empty())
        for (auto& c : split(f[14], ';')) s.per_follower_txn_counts.push_back(parse_u64("per_follower_txn_counts", c));
      if (f[15] != "0" && f[15] != "1") throw ConfigError("accepted: expected 0 or 1");
      s.accepted = f[15] == "1";
      records[it->second].samples.push_back(std::move(s));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  for (auto& r : records) compute_aggregates(r);
  compute_speedups(records);
  return records;
}

const std::vector<std::string>& metric_families() {
  static const std::vector<std::string> families{"exec_time",     "speedup",      "e2e_time",
                                                 "shards",        "largest_shard", "per_follower",
                                                 "analyze_time", "throughput"};
  return families;
}

namespace {

struct FamilyView {
  bool (*include)(const BenchmarkRecord&);
  Aggregate (*value)(const BenchmarkRecord&);
};

bool any_record(const BenchmarkRecord&) { return true; }
bool miner_only(const BenchmarkRecord& r) { return r.role == "miner"; }
bool community_only(const BenchmarkRecord& r) { return r.mode == "community"; }

FamilyView family_view(const std::string& family) {
  if (family == "exec_time") return {any_record, [](const BenchmarkRecord& r) { return r.exec_time_ms; }};
  if (family == "speedup") return {any_record, [](const BenchmarkRecord& r) { return Aggregate{r.speedup, 0}; }};
  if (family == "e2e_time") return {miner_only, [](const BenchmarkRecord& r) { return r.e2e_mine_time_ms; }};
  if (family == "shards") return {community_only, [](const BenchmarkRecord& r) { return r.shard_count; }};
  if (family == "largest_shard") return {community_only, [](const BenchmarkRecord& r) { return r.max_shard_size; }};
  if (family == "per_follower") return {community_only, [](const BenchmarkRecord& r) { return r.per_follower_txns; }};
  if (family == "analyze_time") return {community_only, [](const BenchmarkRecord& r) { return r.analyze_time_us; }};
  if (family == "throughput")
    return {any_record, [](const BenchmarkRecord& r) { return Aggregate{r.throughput_tps, 0}; }};
  throw ConfigError("unknown metric family '" + family + "'");
}

}  // namespace

std::string render_family(const std::vector<BenchmarkRecord>& records, const std::string& family,
                          ReportFormat format) {
  const auto view = family_view(family);
  std::vector<const BenchmarkRecord*> rows;
  for (const auto& r : records)
    if (view.include(r)) rows.push_back(&r);

  if (format == ReportFormat::PlotData) {
    // Series are keyed by follower count, qualified by whichever other
    // dimensions vary in this record set.
    std::set<std::string> roles, phases, rhos;
    for (auto* r : rows) {
      roles.insert(r->role);
      phases.insert(r->phase);
      rhos.insert(r->rho.str());
    }
    std::string out = "# " + family + "\nx\tseries\ty\n";
    for (auto* r : rows) {
      std::string series = r->mode == "serial" ? "serial" : "F=" + std::to_string(r->followers);
      if (roles.size() > 1) series += "/" + r->role;
      if (phases.size() > 1) series += "/" + r->phase;
      if (rhos.size() > 1) series += "/rho=" + r->rho.str();
      out += std::to_string(r->txns_per_block) + '\t' + series + '\t' + num(view.value(*r).mean) + '\n';
    }
    return out;
  }

  const char sep = format == ReportFormat::Csv ? ',' : '\t';
  const char* columns[] = {"config_id", "rho",  "txns_per_block", "mode", "followers",
                           "phase",     "role", "blocks",         "mean", "stddev"};
  std::string out;
  for (std::size_t k = 0; k < std::size(columns); ++k) {
    if (k) out += sep;
    out += columns[k];
  }
  out += '\n';
  for (auto* r : rows) {
    auto v = view.value(*r);
    std::string fields[] = {r->config_id, r->rho.str(), std::to_string(r->txns_per_block), r->mode,
                            std::to_string(r->followers), r->phase, r->role, std::to_string(r->samples.size()),
                            num(v.mean), num(v.stddev)};
    for (std::size_t k = 0; k < std::size(fields); ++k) {
      if (k) out += sep;
      out += fields[k];
    }
    out += '\n';
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(const std::vector<BenchmarkRecord>& records, ReportFormat format,
                                               const std::filesystem::path& dir) {
  if (records.empty()) throw ConfigError("emit_report: no records");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const char* ext = format == ReportFormat::Csv ? ".csv" : format == ReportFormat::Tsv ? ".tsv" : ".dat";
  std::vector<std::filesystem::path> paths;
  for (const auto& family : metric_families()) {
    auto path = dir / (family + ext);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << render_family(records, family, format);
    if (!out) throw IoError("write failed for " + path.string());
    paths.push_back(path);
  }
  return paths;
}

}  // namespace shardchain
