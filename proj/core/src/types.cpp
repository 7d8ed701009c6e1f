#include "shardchain/types.hpp"

#include "shardchain/hash.hpp"

namespace shardchain {

namespace {

const Account kDefaultAccount{};
const Word kZeroWord{};

}  // namespace

Word Account::load(const Word& key) const {
  auto it = storage.find(key);
  return it == storage.end() ? kZeroWord : it->second;
}

void Account::store(const Word& key, const Word& value) {
  if (value.is_zero())
    storage.erase(key);
  else
    storage[key] = value;
}

const Account& WorldState::get(const Address& addr) const {
  auto it = accounts_.find(addr);
  return it == accounts_.end() ? kDefaultAccount : it->second;
}

Account& WorldState::at(const Address& addr) { return accounts_[addr]; }

void WorldState::compact() {
  std::erase_if(accounts_, [](const auto& kv) { return kv.second.is_default(); });
}

Wei WorldState::total_balance() const {
  Wei total = 0;
  for (const auto& [addr, acct] : accounts_) total += acct.balance;
  return total;
}

bool operator==(const WorldState& a, const WorldState& b) {
  auto ia = a.accounts_.begin();
  auto ib = b.accounts_.begin();
  auto skip = [](auto& it, const WorldState::Map& m) {
    while (it != m.end() && it->second.is_default()) ++it;
  };
  for (;;) {
    skip(ia, a.accounts_);
    skip(ib, b.accounts_);
    if (ia == a.accounts_.end() || ib == b.accounts_.end())
      return ia == a.accounts_.end() && ib == b.accounts_.end();
    if (ia->first != ib->first || !(ia->second == ib->second)) return false;
    ++ia;
    ++ib;
  }
}

Hash256 state_digest(const WorldState& state) {
  Sha256 h;
  ByteWriter w(128);
  for (const auto& [addr, acct] : state.entries()) {
    if (acct.is_default()) continue;
    w = ByteWriter(128);
    w.fixed(addr);
    w.u128(acct.balance);
    w.count(acct.storage.size());
    h.update(w.bytes());
    for (const auto& [key, value] : acct.storage) {
      h.update(key.span());
      h.update(value.span());
    }
  }
  return h.finish();
}

}  // namespace shardchain
