#pragma once

// Builders and brute-force reference implementations shared by the unit and
// acceptance tests. The references are deliberately naive.

#include <algorithm>
#include <bitset>
#include <stdexcept>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "shardchain/abi.hpp"
#include "shardchain/analyzer.hpp"
#include "shardchain/types.hpp"

namespace testing_support {

using namespace shardchain;

inline Address addr(std::uint64_t n) { return Address::from_index(n, 0x0a); }
inline Address contract_addr(std::uint64_t n) { return Address::from_index(n, 0xcc); }

inline Transaction pay(TxId id, const Address& from, const Address& to, Wei value, std::uint64_t block = 1) {
  Transaction tx;
  tx.tx_id = id;
  tx.from = from;
  tx.to = to;
  tx.value = value;
  tx.block_number = block;
  return tx;
}

inline Transaction call(TxId id, const Address& from, const Address& contract, Function f,
                        const std::vector<AbiValue>& args, std::uint64_t block = 1) {
  Transaction tx = pay(id, from, contract, 0, block);
  tx.input = encode_call(f, args);
  return tx;
}

inline std::vector<Transaction> renumber(std::vector<Transaction> txns, std::uint64_t block = 1) {
  for (std::size_t i = 0; i < txns.size(); ++i) {
    txns[i].tx_id = i;
    txns[i].block_number = block;
  }
  return txns;
}

/// Partition of tx ids into sets, independent of any ordering.
using Partition = std::set<std::set<TxId>>;

/// Transitive closure of "shares a touched address" over at most 64
/// transactions, computed by repeated relational join until a fixpoint.
inline Partition closure_partition(const std::vector<Transaction>& txns, DepsMode mode = DepsMode::Full) {
  const std::size_t n = txns.size();
  if (n > 64) throw std::invalid_argument("closure_partition: at most 64 transactions");
  std::vector<std::set<Address>> touched(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto t = touched_addresses_lenient(txns[i], mode);
    touched[i] = std::set<Address>(t.begin(), t.end());
  }
  std::vector<std::bitset<64>> reach(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      reach[i][j] = i == j || std::any_of(touched[i].begin(), touched[i].end(),
                                          [&](const Address& a) { return touched[j].contains(a); });
  for (bool changed = true; changed;) {
    changed = false;
    auto next = reach;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (reach[i][k]) next[i] |= reach[k];
    changed = next != reach;
    reach = std::move(next);
  }
  Partition out;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<TxId> group;
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j]) group.insert(txns[j].tx_id);
    out.insert(group);
  }
  return out;
}

inline Partition as_partition(const Analysis& a) {
  Partition out;
  for (const auto& s : a.shards) out.insert(std::set<TxId>(s.tx_ids.begin(), s.tx_ids.end()));
  return out;
}

/// Longest-first greedy replayed with a linear scan for the lightest follower.
inline std::vector<std::size_t> reference_loads(std::vector<std::vector<TxId>> shards, std::size_t followers) {
  std::stable_sort(shards.begin(), shards.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  std::vector<std::size_t> load(followers, 0);
  for (const auto& s : shards) {
    std::size_t best = 0;
    for (std::size_t f = 1; f < followers; ++f)
      if (load[f] < load[best]) best = f;
    load[best] += s.size();
  }
  return load;
}

/// Random block over a small address pool so that dependencies are common.
inline std::vector<Transaction> random_block(std::mt19937_64& rng, std::size_t n, std::size_t pool,
                                             bool with_contracts = true) {
  std::uniform_int_distribution<std::size_t> pick(0, pool - 1);
  std::vector<Transaction> txns;
  for (std::size_t i = 0; i < n; ++i) {
    const auto kind = with_contracts ? rng() % 4 : 0;
    if (kind == 0 || kind == 1) {
      txns.push_back(pay(i, addr(pick(rng)), addr(pick(rng)), 1 + rng() % 50));
    } else if (kind == 2) {
      txns.push_back(call(i, addr(pick(rng)), contract_addr(pick(rng) % 4), Function::Transfer,
                          {addr(pick(rng)), word_from_wei(1 + rng() % 5)}));
    } else {
      std::vector<Address> to{addr(pick(rng)), addr(pick(rng))};
      std::vector<Word> amounts{word_from_wei(1), word_from_wei(2)};
      txns.push_back(call(i, addr(pick(rng)), contract_addr(pick(rng) % 4), Function::Multisend,
                          {contract_addr(pick(rng) % 4), to, amounts}));
    }
  }
  return txns;
}

}  // namespace testing_support
