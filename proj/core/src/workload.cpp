#include "shardchain/workload.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "shardchain/abi.hpp"
#include "shardchain/engine.hpp"
#include "shardchain/errors.hpp"

namespace shardchain {

Rho Rho::parse(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) throw ConfigError("rho must look like 1/4, got '" + text + "'");
  Rho r;
  try {
    std::size_t a = 0, b = 0;
    auto num = std::stoul(text.substr(0, slash), &a);
    auto den = std::stoul(text.substr(slash + 1), &b);
    if (a != slash || b != text.size() - slash - 1 || num == 0 || den == 0) throw std::invalid_argument("rho");
    r.contract = static_cast<std::uint32_t>(num);
    r.monetary = static_cast<std::uint32_t>(den);
  } catch (const std::exception&) {
    throw ConfigError("rho must look like 1/4, got '" + text + "'");
  }
  return r;
}

std::size_t Rho::contract_count(std::size_t txns) const {
  std::uint64_t parts = std::uint64_t{contract} + monetary;
  return static_cast<std::size_t>((2 * txns * std::uint64_t{contract} + parts) / (2 * parts));
}

namespace {

/// Platform-independent draws on top of the standardized mt19937_64 sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(unit() * static_cast<double>(n)); }
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(eng_() >> 56);
    return out;
  }

  Word word() { return Word::from_span(bytes(32)); }

 private:
  std::mt19937_64 eng_;
};

class Weighted {
 public:
  explicit Weighted(std::vector<double> weights) : cdf_(std::move(weights)) {
    for (std::size_t i = 1; i < cdf_.size(); ++i) cdf_[i] += cdf_[i - 1];
  }

  static Weighted zipf(std::size_t n, double s, double offset) {
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = 1.0 / std::pow(static_cast<double>(k + 1) + offset, s);
    return Weighted(std::move(w));
  }

  std::size_t sample(Rng& rng) const {
    auto x = rng.unit() * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), x);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

constexpr std::uint8_t kUserTag = 0x01;
constexpr std::uint8_t kContractTag = 0xc0;
constexpr std::size_t kFundedHolders = 64;
const Wei kUserCoins = 1000 * kEther;
const Wei kHouseCoins = 1'000'000 * kEther;
constexpr Wei kGenesisTokens = 1'000'000;

Word small_word(Rng& rng, std::uint64_t lo, std::uint64_t hi) { return word_from_wei(rng.between(lo, hi)); }

Bytes contract_input(Function f, Rng& rng, const std::vector<Address>& users, const Weighted& user_pick,
                     const Address& contract) {
  auto user = [&] { return users[user_pick.sample(rng)]; };
  switch (f) {
    case Function::Transfer:
    case Function::Approve:
    case Function::Issue: return encode_call(f, {user(), small_word(rng, 1, 10)});
    case Function::Vote: return encode_call(f, {small_word(rng, 0, 7)});
    case Function::SubmitTransaction:
    case Function::SetGenesisAddress:
      return encode_call(f, {user(), small_word(rng, 1, 1000), rng.bytes(rng.below(65))});
    case Function::Callback: return encode_call(f, {rng.word(), rng.bytes(rng.between(8, 48)), rng.bytes(rng.below(65))});
    case Function::PlayerRollDice: return encode_call(f, {small_word(rng, 1, 100)});
    case Function::Multisend: {
      auto n = rng.between(2, 4);
      std::vector<Address> to;
      std::vector<Word> amounts;
      for (std::uint64_t i = 0; i < n; ++i) {
        to.push_back(user());
        amounts.push_back(small_word(rng, 1, 5));
      }
      return encode_call(f, {contract, std::move(to), std::move(amounts)});
    }
    case Function::SmartAirdrop:
    case Function::PublicMine: return encode_call(f, {});
  }
  return {};
}

}  // namespace

Workload synthesize(const WorkloadSpec& spec) {
  if (spec.txns_per_block == 0) throw ConfigError("txns_per_block must be positive");
  Workload w;
  auto n_users = spec.effective_user_pool();
  auto n_contracts = spec.effective_contract_pool();
  for (std::size_t i = 0; i < n_users; ++i) w.users.push_back(Address::from_index(i, kUserTag));
  for (std::size_t i = 0; i < n_contracts; ++i) w.contracts.push_back(Address::from_index(i, kContractTag));

  for (const auto& u : w.users) w.genesis.at(u).balance = kUserCoins;
  for (const auto& c : w.contracts) {
    auto& acct = w.genesis.at(c);
    acct.balance = kHouseCoins;
    for (std::size_t i = 0; i < std::min(kFundedHolders, n_users); ++i)
      acct.store(slots::token_balance(w.users[i]), word_from_wei(kGenesisTokens));
  }

  auto user_pick = Weighted::zipf(n_users, spec.zipf_skew, spec.zipf_offset);
  auto contract_pick = Weighted::zipf(n_contracts, spec.zipf_skew, spec.zipf_offset);
  std::vector<double> freq;
  for (const auto& info : function_registry()) freq.push_back(static_cast<double>(info.frequency));
  Weighted fn_pick(freq);

  Rng rng(spec.seed);
  auto n_contract_txns = spec.rho.contract_count(spec.txns_per_block);
  for (std::size_t b = 0; b < spec.block_count; ++b) {
    // Contract calls are spread through the block rather than grouped.
    std::vector<bool> is_contract(spec.txns_per_block, false);
    for (std::size_t i = 0; i < n_contract_txns; ++i) is_contract[i] = true;
    for (std::size_t i = spec.txns_per_block; i > 1; --i) {
      auto j = rng.below(i);
      bool tmp = is_contract[i - 1];
      is_contract[i - 1] = is_contract[j];
      is_contract[j] = tmp;
    }

    std::vector<Transaction> block;
    block.reserve(spec.txns_per_block);
    for (std::size_t i = 0; i < spec.txns_per_block; ++i) {
      Transaction tx;
      tx.tx_id = i;
      tx.block_number = b + 1;
      tx.from = w.users[user_pick.sample(rng)];
      if (is_contract[i]) {
        const auto& info = function_registry()[fn_pick.sample(rng)];
        tx.to = w.contracts[contract_pick.sample(rng)];
        tx.input = contract_input(info.function, rng, w.users, user_pick, tx.to);
      } else {
        tx.to = w.users[user_pick.sample(rng)];
        tx.value = rng.between(1, 1000);
      }
      block.push_back(std::move(tx));
    }
    w.blocks.push_back(std::move(block));
  }
  return w;
}

WorldState genesis_for(const std::vector<std::vector<Transaction>>& blocks) {
  WorldState g;
  for (const auto& block : blocks)
    for (const auto& tx : block) {
      auto& from = g.at(tx.from);
      from.balance += tx.value;
      if (from.balance < kUserCoins) from.balance = kUserCoins;
      if (tx.is_contract() && g.get(tx.to).balance < kHouseCoins) g.at(tx.to).balance = kHouseCoins;
    }
  return g;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

IngestResult ingest_csv_text(const std::string& text, IngestOptions options) {
  IngestResult result;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("csv: missing header row");
  auto header = split_csv_line(line);
  auto column = [&](const char* name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IoError(std::string("csv: missing column ") + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  auto c_from = column("from_address");
  auto c_to = column("to_address");
  auto c_value = column("value");
  auto c_input = column("input");
  auto c_creates = column("receipt_contract_address");
  auto c_block = column("block_number");
  auto width = std::max({c_from, c_to, c_value, c_input, c_creates, c_block}) + 1;

  std::map<std::uint64_t, TxId> next_id;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    try {
      if (cells.size() < width) throw DecodeError("row has " + std::to_string(cells.size()) + " columns");
      Transaction tx;
      tx.from = Address::parse(cells[c_from]);
      if (!cells[c_creates].empty()) tx.creates = Address::parse(cells[c_creates]);
      if (!cells[c_to].empty())
        tx.to = Address::parse(cells[c_to]);
      else if (tx.creates)
        tx.to = *tx.creates;
      else
        throw DecodeError("row has neither to_address nor receipt_contract_address");
      tx.value = parse_wei(cells[c_value]);
      tx.input = from_hex(cells[c_input]);
      try {
        tx.block_number = std::stoull(cells[c_block]);
      } catch (const std::exception&) {
        throw DecodeError("bad block_number '" + cells[c_block] + "'");
      }
      if (!tx.input.empty() && find_function(tx.input) == nullptr) {
        if (!options.coerce_unknown) {
          ++result.skipped_unknown;
          continue;
        }
        tx.input.clear();
        ++result.coerced_unknown;
      }
      tx.tx_id = next_id[tx.block_number]++;
      result.txns.push_back(std::move(tx));
    } catch (const DecodeError& e) {
      result.errors.push_back(ParseIssue{line_no, e.what()});
    }
  }
  return result;
}

IngestResult ingest_csv(const std::filesystem::path& path, IngestOptions options) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ingest_csv_text(ss.str(), options);
}

std::string to_csv(const std::vector<std::vector<Transaction>>& blocks) {
  std::ostringstream out;
  out << kTxCsvHeader << '\n';
  for (const auto& block : blocks)
    for (const auto& tx : block) {
      out << tx.from.hex() << ',' << tx.to.hex() << ',' << wei_to_string(tx.value) << ',';
      if (!tx.input.empty()) out << "0x" << to_hex(tx.input);
      out << ',';
      if (tx.creates) out << tx.creates->hex();
      out << ',' << tx.block_number << '\n';
    }
  return out.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<std::vector<Transaction>>& blocks) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << to_csv(blocks);
  if (!f) throw IoError("write failed for " + path.string());
}

std::vector<std::vector<Transaction>> group_by_block(const std::vector<Transaction>& txns) {
  std::map<std::uint64_t, std::vector<Transaction>> by_number;
  for (const auto& tx : txns) by_number[tx.block_number].push_back(tx);
  std::vector<std::vector<Transaction>> out;
  for (auto& [n, block] : by_number) {
    std::sort(block.begin(), block.end(), [](const auto& a, const auto& b) { return a.tx_id < b.tx_id; });
    out.push_back(std::move(block));
  }
  return out;
}

}  // namespace shardchain
