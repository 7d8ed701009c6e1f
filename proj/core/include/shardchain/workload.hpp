#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shardchain/types.hpp"

namespace shardchain {

/// Ratio of contract calls to monetary transfers in a block, e.g. 1/4.
struct Rho {
  std::uint32_t contract = 1;
  std::uint32_t monetary = 1;

  /// "1/4" style; both parts positive.
  static Rho parse(const std::string& text);
  std::string str() const { return std::to_string(contract) + "/" + std::to_string(monetary); }
  /// round(txns * rho / (1 + rho)), halves rounding up.
  std::size_t contract_count(std::size_t txns) const;

  bool operator==(const Rho&) const = default;
};

struct WorkloadSpec {
  Rho rho;
  std::size_t txns_per_block = 100;
  std::size_t block_count = 10;
  std::uint64_t seed = 42;
  /// Account pool size; 0 means 4 x txns_per_block.
  std::size_t user_pool = 0;
  /// Contract pool size; 0 means txns_per_block / 2.
  std::size_t contract_pool = 0;
  /// Popularity of the rank-k account or contract is proportional to
  /// 1 / (k + zipf_offset)^zipf_skew.
  double zipf_skew = 1.1;
  double zipf_offset = 100;

  std::size_t effective_user_pool() const { return user_pool ? user_pool : 4 * txns_per_block; }
  std::size_t effective_contract_pool() const { return contract_pool ? contract_pool : std::max<std::size_t>(1, txns_per_block / 2); }
};

struct Workload {
  WorldState genesis;
  /// Block i holds transactions numbered 0.. with block_number i + 1.
  std::vector<std::vector<Transaction>> blocks;
  std::vector<Address> users;
  std::vector<Address> contracts;
};

/// Seeded and platform independent: the same spec yields byte-identical
/// blocks everywhere.
Workload synthesize(const WorkloadSpec& spec);

/// Funds every sender and contract in `blocks` so that replayed historical
/// transactions mostly succeed.
WorldState genesis_for(const std::vector<std::vector<Transaction>>& blocks);

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct IngestResult {
  std::vector<Transaction> txns;
  std::size_t skipped_unknown = 0;
  std::size_t coerced_unknown = 0;
  std::vector<ParseIssue> errors;
};

struct IngestOptions {
  /// Keep calls to unregistered functions as plain transfers instead of
  /// skipping them.
  bool coerce_unknown = false;
};

inline constexpr const char* kTxCsvHeader = "from_address,to_address,value,input,receipt_contract_address,block_number";

/// Columns are located by header name. Row problems are collected in the
/// result; an unreadable file or missing column throws IoError.
/// Transactions get tx_ids numbered densely per block_number in file order.
IngestResult ingest_csv(const std::filesystem::path& path, IngestOptions options = {});
IngestResult ingest_csv_text(const std::string& text, IngestOptions options = {});

void write_csv(const std::filesystem::path& path, const std::vector<std::vector<Transaction>>& blocks);
std::string to_csv(const std::vector<std::vector<Transaction>>& blocks);

/// Splits ingested transactions into blocks by ascending block number.
std::vector<std::vector<Transaction>> group_by_block(const std::vector<Transaction>& txns);

}  // namespace shardchain
