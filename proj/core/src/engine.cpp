#include "shardchain/engine.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "shardchain/abi.hpp"
#include "shardchain/errors.hpp"
#include "shardchain/hash.hpp"

namespace shardchain {

void SyntheticCost::burn(const Transaction& tx) const {
  auto amount = tx.is_contract() ? contract : monetary;
  if (amount.count() <= 0) return;
  if (mode == CostMode::Sleep) {
    std::this_thread::sleep_for(amount);
    return;
  }
  auto deadline = std::chrono::steady_clock::now() + amount;
  volatile std::uint64_t sink = tx.tx_id;
  while (std::chrono::steady_clock::now() < deadline) {
    for (int i = 0; i < 64; ++i) sink = sink * 6364136223846793005ULL + 1442695040888963407ULL;
  }
}

namespace slots {

namespace {

Word derive(std::string_view tag, std::initializer_list<ByteSpan> parts) {
  Bytes buf(tag.begin(), tag.end());
  for (auto p : parts) buf.insert(buf.end(), p.begin(), p.end());
  return sha256(buf);
}

Bytes be64(std::uint64_t v) {
  ByteWriter w;
  w.u64(v);
  return std::move(w).take();
}

}  // namespace

Word token_balance(const Address& holder) { return derive("balance", {holder.span()}); }
Word allowance(const Address& owner, const Address& spender) {
  return derive("allowance", {owner.span(), spender.span()});
}
Word voted(const Address& voter) { return derive("voted", {voter.span()}); }
Word tally(const Word& proposal) { return derive("tally", {proposal.span()}); }
Word pending_count() { return derive("pending.count", {}); }
Word pending_field(std::uint64_t index, std::string_view field) {
  auto idx = be64(index);
  return derive("pending", {idx, ByteSpan(reinterpret_cast<const std::uint8_t*>(field.data()), field.size())});
}
Word callback(const Word& id) { return derive("callback", {id.span()}); }
Word airdrop_claimed(const Address& holder) { return derive("airdrop", {holder.span()}); }
Word genesis_field(std::string_view field) {
  return derive("genesis", {ByteSpan(reinterpret_cast<const std::uint8_t*>(field.data()), field.size())});
}

}  // namespace slots

unsigned dice_roll(std::uint64_t block_number, TxId tx_id) {
  ByteWriter w;
  w.u64(block_number);
  w.u64(tx_id);
  auto h = sha256(w.bytes());
  unsigned r = 0;
  for (auto b : h.bytes) r = (r * 256 + b) % 6;
  return r + 1;
}

Wei token_supply(const WorldState& state, const Address& contract, const std::vector<Address>& holders) {
  Wei total = 0;
  const auto& acct = state.get(contract);
  for (const auto& h : holders) total += wei_from_word(acct.load(slots::token_balance(h)));
  return total;
}

namespace {

struct Failure {
  std::string reason;
};

/// Journaled view over a WorldState: first access to an account saves its
/// prior value so a failed transaction can be undone exactly.
class Journal {
 public:
  Journal(WorldState& state, ExecOptions options) : state_(state), options_(options) {}

  const Account& read(const Address& a) {
    note(a);
    return state_.get(a);
  }

  Account& write(const Address& a) {
    note(a);
    return state_.at(a);
  }

  void rollback() {
    for (auto it = saved_.rbegin(); it != saved_.rend(); ++it) {
      if (it->second)
        state_.put(it->first, *it->second);
      else
        state_.erase(it->first);
    }
  }

  std::vector<Address> touched() const { return {touched_.begin(), touched_.end()}; }

 private:
  void note(const Address& a) {
    if (!touched_.insert(a).second) return;
    bool present = state_.contains(a);
    if (options_.strict_slice && !present) throw SliceMiss("account " + a.hex() + " missing from state slice");
    saved_.emplace_back(a, present ? std::optional<Account>(state_.get(a)) : std::nullopt);
  }

  WorldState& state_;
  ExecOptions options_;
  std::set<Address> touched_;
  std::vector<std::pair<Address, std::optional<Account>>> saved_;
};

Wei checked_add(Wei a, Wei b) {
  if (a > ~static_cast<Wei>(0) - b) throw Failure{"amount overflow"};
  return a + b;
}

void move_coins(Journal& j, const Address& from, const Address& to, Wei amount) {
  if (j.read(from).balance < amount) throw Failure{"insufficient balance"};
  if (from == to) return;
  j.write(from).balance -= amount;
  auto& dst = j.write(to);
  dst.balance = checked_add(dst.balance, amount);
}

Wei load_amount(const Account& acct, const Word& key) {
  try {
    return wei_from_word(acct.load(key));
  } catch (const DecodeError&) {
    throw Failure{"corrupt storage amount"};
  }
}

void credit_token(Account& contract, const Address& holder, Wei amount) {
  auto key = slots::token_balance(holder);
  contract.store(key, word_from_wei(checked_add(load_amount(contract, key), amount)));
}

void debit_token(Account& contract, const Address& holder, Wei amount) {
  auto key = slots::token_balance(holder);
  auto have = load_amount(contract, key);
  if (have < amount) throw Failure{"insufficient token balance"};
  contract.store(key, word_from_wei(have - amount));
}

Word flag_word() { return word_from_wei(1); }

Word bytes_digest(ByteSpan a, ByteSpan b = {}) {
  Bytes buf(a.begin(), a.end());
  buf.insert(buf.end(), b.begin(), b.end());
  auto d = sha256(buf);
  if (d.is_zero()) d.bytes[31] = 1;
  return d;
}

void run_contract(const Transaction& tx, Journal& j) {
  auto call = decode_call(tx.input);
  const Address& sender = tx.from;
  switch (call.info->function) {
    case Function::Transfer: {
      auto recipient = call.address_arg(0);
      auto amount = call.amount_arg(1);
      auto& c = j.write(tx.to);
      debit_token(c, sender, amount);
      credit_token(c, recipient, amount);
      break;
    }
    case Function::Approve: {
      j.write(tx.to).store(slots::allowance(sender, call.address_arg(0)), call.word_arg(1));
      break;
    }
    case Function::Vote: {
      auto& c = j.write(tx.to);
      auto voted = slots::voted(sender);
      if (!c.load(voted).is_zero()) throw Failure{"sender already voted"};
      c.store(voted, flag_word());
      auto key = slots::tally(call.word_arg(0));
      c.store(key, word_from_wei(checked_add(load_amount(c, key), 1)));
      break;
    }
    case Function::SubmitTransaction: {
      auto dest = call.address_arg(0);
      auto amount = call.word_arg(1);
      const auto& data = call.bytes_arg(2);
      auto& c = j.write(tx.to);
      auto count = load_amount(c, slots::pending_count());
      auto index = static_cast<std::uint64_t>(count);
      Word dest_word;
      std::copy(dest.bytes.begin(), dest.bytes.end(), dest_word.bytes.begin() + 12);
      dest_word.bytes[0] = 1;  // distinguishes the zero address from "unset"
      c.store(slots::pending_field(index, "dest"), dest_word);
      c.store(slots::pending_field(index, "amount"), amount);
      c.store(slots::pending_field(index, "data"), bytes_digest(data));
      c.store(slots::pending_count(), word_from_wei(checked_add(count, 1)));
      break;
    }
    case Function::Issue: {
      auto to = call.address_arg(0);
      auto amount = call.amount_arg(1);
      credit_token(j.write(tx.to), to, amount);
      break;
    }
    case Function::Callback: {
      auto id = call.word_arg(0);
      j.write(tx.to).store(slots::callback(id), bytes_digest(call.bytes_arg(1), call.bytes_arg(2)));
      break;
    }
    case Function::PlayerRollDice: {
      auto bet = call.amount_arg(0);
      if (j.read(sender).balance < bet) throw Failure{"bettor balance below bet"};
      if (dice_roll(tx.block_number, tx.tx_id) >= 4) {
        if (bet > (~static_cast<Wei>(0)) / 2) throw Failure{"amount overflow"};
        if (j.read(tx.to).balance < 2 * bet) throw Failure{"house cannot cover payout"};
        move_coins(j, tx.to, sender, 2 * bet);
      } else {
        move_coins(j, sender, tx.to, bet);
      }
      break;
    }
    case Function::Multisend: {
      auto token = call.address_arg(0);
      const auto& recipients = std::get<std::vector<Address>>(call.args.at(1));
      const auto& amounts = std::get<std::vector<Word>>(call.args.at(2));
      if (recipients.size() != amounts.size()) throw Failure{"multisend array lengths differ"};
      auto& c = j.write(token);
      for (std::size_t i = 0; i < recipients.size(); ++i) {
        Wei amount = 0;
        try {
          amount = wei_from_word(amounts[i]);
        } catch (const DecodeError&) {
          throw Failure{"multisend amount exceeds 128 bits"};
        }
        debit_token(c, sender, amount);
        credit_token(c, recipients[i], amount);
      }
      break;
    }
    case Function::SmartAirdrop: {
      auto& c = j.write(tx.to);
      auto claimed = slots::airdrop_claimed(sender);
      if (!c.load(claimed).is_zero()) throw Failure{"airdrop already claimed"};
      c.store(claimed, flag_word());
      credit_token(c, sender, kAirdropAmount);
      break;
    }
    case Function::PublicMine: {
      credit_token(j.write(tx.to), sender, kPublicMineAmount);
      break;
    }
    case Function::SetGenesisAddress: {
      auto& c = j.write(tx.to);
      auto set = slots::genesis_field("set");
      if (!c.load(set).is_zero()) throw Failure{"genesis already set"};
      auto addr = call.address_arg(0);
      Word addr_word;
      std::copy(addr.bytes.begin(), addr.bytes.end(), addr_word.bytes.begin() + 12);
      c.store(set, flag_word());
      c.store(slots::genesis_field("address"), addr_word);
      c.store(slots::genesis_field("amount"), call.word_arg(1));
      c.store(slots::genesis_field("data"), bytes_digest(call.bytes_arg(2)));
      break;
    }
  }
}

}  // namespace

ExecOutcome execute_transaction(const Transaction& tx, WorldState& state, const SyntheticCost& cost,
                                ExecOptions options) {
  cost.burn(tx);
  Journal j(state, options);
  ExecOutcome out;
  try {
    j.read(tx.from);
    j.read(tx.to);
    if (tx.creates) j.write(*tx.creates);
    move_coins(j, tx.from, tx.to, tx.value);
    if (tx.is_contract()) run_contract(tx, j);
  } catch (const Failure& f) {
    j.rollback();
    out.status = ExecStatus::Failed;
    out.reason = f.reason;
  } catch (const DecodeError& e) {
    j.rollback();
    out.status = ExecStatus::Failed;
    out.reason = std::string("decode: ") + e.what();
  }
  out.touched = j.touched();
  return out;
}

ShardResult execute_shard(const std::vector<Transaction>& txns, WorldState state, const SyntheticCost& cost,
                          ExecOptions options) {
  ShardResult r{std::move(state), {}};
  r.outcomes.reserve(txns.size());
  for (const auto& tx : txns) r.outcomes.push_back(execute_transaction(tx, r.state, cost, options));
  return r;
}

}  // namespace shardchain
