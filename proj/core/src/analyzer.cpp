#include "shardchain/analyzer.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "shardchain/abi.hpp"
#include "shardchain/errors.hpp"

namespace shardchain {

namespace {

void push_unique(std::vector<Address>& out, const Address& a) {
  if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
}

std::vector<Address> base_addresses(const Transaction& tx) {
  std::vector<Address> out{tx.from};
  push_unique(out, tx.to);
  if (tx.creates) push_unique(out, *tx.creates);
  return out;
}

void add_parameter_addresses(std::vector<Address>& out, const Transaction& tx) {
  auto call = decode_call(tx.input);
  for (const auto& arg : call.args) {
    if (const auto* a = std::get_if<Address>(&arg)) {
      push_unique(out, *a);
    } else if (const auto* list = std::get_if<std::vector<Address>>(&arg)) {
      for (const auto& x : *list) push_unique(out, x);
    }
  }
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

Analysis finalize(std::vector<std::vector<TxId>> groups, std::size_t tx_count) {
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  Analysis out;
  out.shard_of.assign(tx_count, 0);
  out.shards.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto id = static_cast<ShardId>(i);
    for (auto tx : groups[i]) out.shard_of[tx] = id;
    out.shards.push_back(Shard{id, std::move(groups[i])});
  }
  return out;
}

}  // namespace

std::vector<Address> touched_addresses(const Transaction& tx, DepsMode mode) {
  auto out = base_addresses(tx);
  if (mode == DepsMode::Full && tx.is_contract()) add_parameter_addresses(out, tx);
  return out;
}

std::vector<Address> touched_addresses_lenient(const Transaction& tx, DepsMode mode) {
  auto out = base_addresses(tx);
  if (mode == DepsMode::Full && tx.is_contract()) {
    try {
      add_parameter_addresses(out, tx);
    } catch (const DecodeError&) {
    }
  }
  return out;
}

Analysis analyze(const std::vector<Transaction>& txns, DepsMode mode) {
  std::unordered_map<Address, std::size_t> index;
  index.reserve(txns.size() * 3);
  std::vector<std::vector<std::size_t>> vertices(txns.size());
  for (std::size_t i = 0; i < txns.size(); ++i) {
    if (txns[i].tx_id != i) throw std::invalid_argument("analyze: tx ids must be dense from 0");
    for (const auto& a : touched_addresses_lenient(txns[i], mode))
      vertices[i].push_back(index.try_emplace(a, index.size()).first->second);
  }

  // Each transaction is a clique over its addresses; a star spanning the
  // clique yields the same components.
  UnionFind uf(index.size());
  for (const auto& v : vertices)
    for (std::size_t k = 1; k < v.size(); ++k) uf.unite(v[0], v[k]);

  std::unordered_map<std::size_t, std::size_t> group_of;
  std::vector<std::vector<TxId>> groups;
  for (std::size_t i = 0; i < txns.size(); ++i) {
    auto root = uf.find(vertices[i][0]);
    auto [it, inserted] = group_of.try_emplace(root, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return finalize(std::move(groups), txns.size());
}

Analysis shards_from_hints(const ShardHints& hints) {
  std::map<ShardId, std::vector<TxId>> by_hint;
  for (const auto& [tx, shard] : hints) by_hint[shard].push_back(tx);
  std::vector<std::vector<TxId>> groups;
  groups.reserve(by_hint.size());
  for (auto& [id, txs] : by_hint) groups.push_back(std::move(txs));
  std::size_t count = hints.empty() ? 0 : hints.rbegin()->first + 1;
  return finalize(std::move(groups), count);
}

bool hints_respect_dependencies(const std::vector<Transaction>& txns, const ShardHints& hints,
                                DepsMode mode) {
  std::unordered_map<Address, ShardId> owner;
  for (const auto& tx : txns) {
    auto it = hints.find(tx.tx_id);
    if (it == hints.end()) return false;
    for (const auto& a : touched_addresses_lenient(tx, mode)) {
      auto [pos, inserted] = owner.try_emplace(a, it->second);
      if (!inserted && pos->second != it->second) return false;
    }
  }
  return true;
}

std::size_t ShardAssignment::total_txns() const {
  std::size_t n = 0;
  for (const auto& f : per_follower) n += f.txns.size();
  return n;
}

ShardAssignment load_balance(const std::vector<Shard>& shards, const std::vector<FollowerId>& followers,
                             const std::vector<Transaction>& txns) {
  if (followers.empty()) throw std::invalid_argument("load_balance: no followers");

  std::vector<std::size_t> order(shards.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = shards[a].tx_ids;
    const auto& sb = shards[b].tx_ids;
    if (sa.size() != sb.size()) return sa.size() > sb.size();
    return sa.front() < sb.front();
  });

  // (load, follower id, index into followers); smallest first.
  using Slot = std::tuple<std::size_t, FollowerId, std::size_t>;
  std::priority_queue<Slot, std::vector<Slot>, std::greater<>> heap;
  for (std::size_t i = 0; i < followers.size(); ++i) heap.emplace(0, followers[i], i);

  ShardAssignment out;
  out.per_follower.resize(followers.size());
  for (std::size_t i = 0; i < followers.size(); ++i) out.per_follower[i].follower = followers[i];
  out.shard_of.assign(txns.size(), 0);
  out.placements.reserve(shards.size());

  for (auto s : order) {
    auto [load, id, idx] = heap.top();
    heap.pop();
    const auto& shard = shards[s];
    auto& dest = out.per_follower[idx].txns;
    for (auto tx : shard.tx_ids) {
      dest.push_back(txns.at(tx));
      out.shard_of.at(tx) = shard.shard_id;
    }
    out.placements.emplace_back(shard.shard_id, idx);
    heap.emplace(load + shard.tx_ids.size(), id, idx);
  }
  return out;
}

ShardStats shard_stats(const Analysis& analysis, const ShardAssignment* assignment) {
  ShardStats s;
  s.shard_count = analysis.shards.size();
  for (const auto& sh : analysis.shards) s.max_shard_size = std::max(s.max_shard_size, sh.tx_ids.size());
  if (assignment)
    for (const auto& f : assignment->per_follower) s.per_follower_counts.push_back(f.txns.size());
  return s;
}

}  // namespace shardchain
