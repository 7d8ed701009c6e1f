#include <gtest/gtest.h>

#include <random>

#include "shardchain/abi.hpp"
#include "shardchain/analyzer.hpp"
#include "shardchain/engine.hpp"
#include "shardchain/errors.hpp"
#include "support.hpp"

using namespace shardchain;
using namespace testing_support;

namespace {

const SyntheticCost kFree = SyntheticCost::zero();

Wei tokens(const WorldState& s, const Address& contract, const Address& holder) {
  return wei_from_word(s.get(contract).load(slots::token_balance(holder)));
}

void give_tokens(WorldState& s, const Address& contract, const Address& holder, Wei amount) {
  s.at(contract).store(slots::token_balance(holder), word_from_wei(amount));
}

}  // namespace

TEST(Registry, SelectorsAndOrder) {
  const std::pair<const char*, const char*> expected[] = {
      {"transfer", "a9059cbb"},          {"approve", "095ea7b3"},   {"vote", "0121b93f"},
      {"submitTransaction", "c6427474"}, {"issue", "867904b4"},     {"__callback", "38bbfa50"},
      {"playerRollDice", "dc6dd152"},    {"multisend", "ad8733ca"}, {"SmartAirdrop", "a8faf6f0"},
      {"PublicMine", "87ccccb3"},        {"setGenesisAddress", "0d571742"},
  };
  auto reg = function_registry();
  ASSERT_EQ(reg.size(), 11u);
  for (std::size_t i = 0; i < reg.size(); ++i) {
    EXPECT_EQ(reg[i].name, expected[i].first);
    EXPECT_EQ(to_hex(reg[i].selector), expected[i].second);
    if (i) EXPECT_GE(reg[i - 1].frequency, reg[i].frequency);
  }
  EXPECT_EQ(function_info(Function::Transfer).frequency, 56654u);
  EXPECT_EQ(function_info(Function::SetGenesisAddress).frequency, 3119u);
}

TEST(Abi, RoundTripEveryFunction) {
  const Address a = addr(1);
  const std::vector<std::pair<Function, std::vector<AbiValue>>> calls{
      {Function::Transfer, {a, word_from_wei(5)}},
      {Function::Vote, {word_from_wei(3)}},
      {Function::SubmitTransaction, {a, word_from_wei(5), Bytes{1, 2, 3}}},
      {Function::Callback, {word_from_wei(9), Bytes{'h', 'i'}, Bytes(70, 7)}},
      {Function::Multisend, {a, std::vector<Address>{addr(2), addr(3)}, std::vector<Word>{word_from_wei(1), word_from_wei(2)}}},
      {Function::SmartAirdrop, {}},
  };
  for (const auto& [f, args] : calls) {
    auto input = encode_call(f, args);
    EXPECT_EQ(input.size() % 32, 4u);
    auto decoded = decode_call(input);
    EXPECT_EQ(decoded.info->function, f);
    EXPECT_EQ(decoded.args, args);
  }
}

TEST(Abi, TransferLayoutIsStandard) {
  auto input = encode_call(Function::Transfer, {addr(0x42), word_from_wei(10)});
  ASSERT_EQ(input.size(), 68u);
  EXPECT_EQ(to_hex(ByteSpan(input).first(4)), "a9059cbb");
  EXPECT_EQ(to_hex(ByteSpan(input).subspan(4, 32)), std::string(24, '0') + addr(0x42).hex().substr(2));
  EXPECT_EQ(input.back(), 10);
}

TEST(Abi, RejectsMalformed) {
  auto input = encode_call(Function::Transfer, {addr(1), word_from_wei(5)});
  auto dirty = input;
  dirty[4] = 1;  // nonzero high byte in the address word
  EXPECT_THROW(decode_call(dirty), DecodeError);
  EXPECT_THROW(decode_call(ByteSpan(input).first(40)), DecodeError);
  auto unknown = input;
  unknown[0] = 0;
  EXPECT_THROW(decode_call(unknown), DecodeError);

  auto dyn = encode_call(Function::SubmitTransaction, {addr(1), word_from_wei(5), Bytes{1, 2, 3}});
  auto bad_offset = dyn;
  bad_offset[4 + 64 + 31] = 0xff;  // offset of the bytes argument
  EXPECT_THROW(decode_call(bad_offset), DecodeError);
}

TEST(Execute, MonetaryApplied) {
  WorldState s;
  s.at(addr(1)).balance = 100;
  auto out = execute_transaction(pay(0, addr(1), addr(2), 40), s, kFree);
  EXPECT_TRUE(out.applied());
  EXPECT_EQ(s.get(addr(1)).balance, Wei{60});
  EXPECT_EQ(s.get(addr(2)).balance, Wei{40});
  EXPECT_EQ(out.touched, (std::vector<Address>{addr(1), addr(2)}));
}

TEST(Execute, MonetaryUnderfundedFails) {
  WorldState s;
  s.at(addr(1)).balance = 30;
  auto before = s;
  auto out = execute_transaction(pay(0, addr(1), addr(2), 40), s, kFree);
  EXPECT_EQ(out.status, ExecStatus::Failed);
  EXPECT_TRUE(out.reason.has_value());
  EXPECT_EQ(s.entries(), before.entries());
}

TEST(Execute, TokenTransfer) {
  const Address c = contract_addr(1);
  WorldState s;
  give_tokens(s, c, addr(1), 25);
  auto out = execute_transaction(call(0, addr(1), c, Function::Transfer, {addr(2), word_from_wei(10)}), s, kFree);
  EXPECT_TRUE(out.applied());
  EXPECT_EQ(tokens(s, c, addr(1)), Wei{15});
  EXPECT_EQ(tokens(s, c, addr(2)), Wei{10});

  auto before = s;
  out = execute_transaction(call(1, addr(1), c, Function::Transfer, {addr(2), word_from_wei(16)}), s, kFree);
  EXPECT_EQ(out.status, ExecStatus::Failed);
  EXPECT_EQ(s.entries(), before.entries());
}

TEST(Execute, ApproveAndVote) {
  const Address c = contract_addr(2);
  WorldState s;
  EXPECT_TRUE(execute_transaction(call(0, addr(1), c, Function::Approve, {addr(2), word_from_wei(77)}), s, kFree).applied());
  EXPECT_EQ(wei_from_word(s.get(c).load(slots::allowance(addr(1), addr(2)))), Wei{77});

  EXPECT_TRUE(execute_transaction(call(1, addr(1), c, Function::Vote, {word_from_wei(4)}), s, kFree).applied());
  EXPECT_TRUE(execute_transaction(call(2, addr(2), c, Function::Vote, {word_from_wei(4)}), s, kFree).applied());
  EXPECT_EQ(wei_from_word(s.get(c).load(slots::tally(word_from_wei(4)))), Wei{2});
  auto before = s;
  EXPECT_FALSE(execute_transaction(call(3, addr(1), c, Function::Vote, {word_from_wei(5)}), s, kFree).applied());
  EXPECT_EQ(s, before);
}

TEST(Execute, SubmitTransactionAppends) {
  const Address c = contract_addr(3);
  WorldState s;
  for (TxId i = 0; i < 3; ++i)
    ASSERT_TRUE(execute_transaction(call(i, addr(1), c, Function::SubmitTransaction, {addr(i + 5), word_from_wei(i), Bytes{}}), s, kFree).applied());
  EXPECT_EQ(wei_from_word(s.get(c).load(slots::pending_count())), Wei{3});
  EXPECT_FALSE(s.get(c).load(slots::pending_field(2, "dest")).is_zero());
  EXPECT_TRUE(s.get(c).load(slots::pending_field(3, "dest")).is_zero());
}

TEST(Execute, MintingFunctions) {
  const Address c = contract_addr(4);
  WorldState s;
  EXPECT_TRUE(execute_transaction(call(0, addr(1), c, Function::Issue, {addr(9), word_from_wei(500)}), s, kFree).applied());
  EXPECT_EQ(tokens(s, c, addr(9)), Wei{500});

  EXPECT_TRUE(execute_transaction(call(1, addr(1), c, Function::SmartAirdrop, {}), s, kFree).applied());
  EXPECT_EQ(tokens(s, c, addr(1)), kAirdropAmount);
  EXPECT_FALSE(execute_transaction(call(2, addr(1), c, Function::SmartAirdrop, {}), s, kFree).applied());

  EXPECT_TRUE(execute_transaction(call(3, addr(1), c, Function::PublicMine, {}), s, kFree).applied());
  EXPECT_TRUE(execute_transaction(call(4, addr(1), c, Function::PublicMine, {}), s, kFree).applied());
  EXPECT_EQ(tokens(s, c, addr(1)), kAirdropAmount + 2 * kPublicMineAmount);
}

TEST(Execute, CallbackOverwrites) {
  const Address c = contract_addr(5);
  WorldState s;
  ASSERT_TRUE(execute_transaction(call(0, addr(1), c, Function::Callback, {word_from_wei(1), Bytes{'a'}, Bytes{}}), s, kFree).applied());
  auto first = s.get(c).load(slots::callback(word_from_wei(1)));
  ASSERT_TRUE(execute_transaction(call(1, addr(2), c, Function::Callback, {word_from_wei(1), Bytes{'b'}, Bytes{}}), s, kFree).applied());
  EXPECT_NE(s.get(c).load(slots::callback(word_from_wei(1))), first);
}

TEST(Execute, DiceIsDeterministic) {
  int wins = 0;
  for (TxId id = 0; id < 600; ++id) {
    auto r = dice_roll(12, id);
    ASSERT_GE(r, 1u);
    ASSERT_LE(r, 6u);
    EXPECT_EQ(r, dice_roll(12, id));
    wins += r >= 4;
  }
  EXPECT_GT(wins, 220);
  EXPECT_LT(wins, 380);
}

TEST(Execute, PlayerRollDice) {
  const Address house = contract_addr(6);
  for (TxId id = 0; id < 20; ++id) {
    WorldState s;
    s.at(addr(1)).balance = 100;
    s.at(house).balance = 1000;
    auto out = execute_transaction(call(id, addr(1), house, Function::PlayerRollDice, {word_from_wei(10)}), s, kFree);
    ASSERT_TRUE(out.applied());
    if (dice_roll(1, id) >= 4) {
      EXPECT_EQ(s.get(addr(1)).balance, Wei{120});
      EXPECT_EQ(s.get(house).balance, Wei{980});
    } else {
      EXPECT_EQ(s.get(addr(1)).balance, Wei{90});
      EXPECT_EQ(s.get(house).balance, Wei{1010});
    }
  }
  WorldState poor;
  poor.at(addr(1)).balance = 5;
  EXPECT_FALSE(execute_transaction(call(0, addr(1), house, Function::PlayerRollDice, {word_from_wei(10)}), poor, kFree).applied());
}

TEST(Execute, MultisendIsAtomic) {
  const Address token = contract_addr(7);
  const Address via = contract_addr(8);
  WorldState s;
  give_tokens(s, token, addr(1), 10);
  auto ok = call(0, addr(1), via, Function::Multisend,
                 {token, std::vector<Address>{addr(2), addr(3)}, std::vector<Word>{word_from_wei(4), word_from_wei(5)}});
  EXPECT_TRUE(execute_transaction(ok, s, kFree).applied());
  EXPECT_EQ(tokens(s, token, addr(1)), Wei{1});
  EXPECT_EQ(tokens(s, token, addr(2)), Wei{4});
  EXPECT_EQ(tokens(s, token, addr(3)), Wei{5});

  auto before = s;
  auto short_leg = call(1, addr(1), via, Function::Multisend,
                        {token, std::vector<Address>{addr(2), addr(3)}, std::vector<Word>{word_from_wei(1), word_from_wei(1)}});
  EXPECT_FALSE(execute_transaction(short_leg, s, kFree).applied());
  EXPECT_EQ(s.entries(), before.entries());

  auto mismatch = call(2, addr(1), via, Function::Multisend,
                       {token, std::vector<Address>{addr(2)}, std::vector<Word>{word_from_wei(1), word_from_wei(0)}});
  EXPECT_FALSE(execute_transaction(mismatch, s, kFree).applied());
  EXPECT_EQ(s.entries(), before.entries());
}

TEST(Execute, GenesisWriteOnce) {
  const Address c = contract_addr(9);
  WorldState s;
  EXPECT_TRUE(execute_transaction(call(0, addr(1), c, Function::SetGenesisAddress, {addr(5), word_from_wei(1), Bytes{}}), s, kFree).applied());
  auto before = s;
  EXPECT_FALSE(execute_transaction(call(1, addr(2), c, Function::SetGenesisAddress, {addr(6), word_from_wei(2), Bytes{}}), s, kFree).applied());
  EXPECT_EQ(s, before);
}

TEST(Execute, MalformedCallFailsWithoutChanges) {
  WorldState s;
  s.at(addr(1)).balance = 50;
  auto tx = call(0, addr(1), contract_addr(1), Function::Transfer, {addr(2), word_from_wei(1)});
  tx.value = 20;
  tx.input.resize(30);
  auto before = s;
  auto out = execute_transaction(tx, s, kFree);
  EXPECT_EQ(out.status, ExecStatus::Failed);
  EXPECT_EQ(s.entries(), before.entries());
}

TEST(Execute, StrictSliceReportsMisses) {
  WorldState slice;
  slice.at(addr(1)).balance = 10;
  EXPECT_THROW(execute_transaction(pay(0, addr(1), addr(2), 1), slice, kFree, {.strict_slice = true}), SliceMiss);
  slice.at(addr(2));
  EXPECT_TRUE(execute_transaction(pay(0, addr(1), addr(2), 1), slice, kFree, {.strict_slice = true}).applied());
}

TEST(ExecuteShard, EmptyAndInverse) {
  WorldState s;
  s.at(addr(1)).balance = 10;
  s.at(addr(2)).balance = 10;
  auto empty = execute_shard({}, s, kFree);
  EXPECT_EQ(empty.state, s);
  EXPECT_TRUE(empty.outcomes.empty());
  auto r = execute_shard({pay(0, addr(1), addr(2), 10), pay(1, addr(2), addr(1), 10)}, s, kFree);
  EXPECT_EQ(r.state, s);
  EXPECT_EQ(r.outcomes.size(), 2u);
}

namespace {

WorldState funded_state(const std::vector<Transaction>& txns) {
  WorldState s;
  std::mt19937_64 rng(3);
  for (const auto& tx : txns) {
    for (const auto& a : touched_addresses_lenient(tx)) {
      auto& acct = s.at(a);
      if (acct.balance == 0) acct.balance = 20 + rng() % 40;
    }
    if (tx.is_contract()) {
      auto call = decode_call(tx.input);
      const Address token = call.info->function == Function::Multisend ? call.address_arg(0) : tx.to;
      give_tokens(s, token, tx.from, rng() % 8);
    }
  }
  return s;
}

}  // namespace

TEST(ExecuteProperties, ConservationAtomicityAndSoundness) {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 200; ++iter) {
    auto txns = random_block(rng, 30, 15);
    auto s = funded_state(txns);
    for (const auto& tx : txns) {
      auto before = s;
      auto out = execute_transaction(tx, s, kFree);
      // Coin conservation: no function in random_block mints coins.
      ASSERT_EQ(s.total_balance(), before.total_balance());
      if (!out.applied()) ASSERT_EQ(s.entries(), before.entries());
      auto allowed = touched_addresses(tx);
      for (const auto& t : out.touched)
        ASSERT_NE(std::find(allowed.begin(), allowed.end(), t), allowed.end());
    }
  }
}

TEST(ExecuteProperties, DisjointShardsCommute) {
  std::mt19937_64 rng(123);
  for (int iter = 0; iter < 100; ++iter) {
    auto txns = random_block(rng, 40, 60);
    auto s = funded_state(txns);
    auto a = analyze(txns);
    if (a.shards.size() < 2) continue;
    auto pick = [&](const Shard& sh) {
      std::vector<Transaction> out;
      for (auto id : sh.tx_ids) out.push_back(txns[id]);
      return out;
    };
    auto s1 = pick(a.shards[0]);
    auto s2 = pick(a.shards[1]);
    auto ab = execute_shard(s2, execute_shard(s1, s, kFree).state, kFree).state;
    auto ba = execute_shard(s1, execute_shard(s2, s, kFree).state, kFree).state;
    ASSERT_EQ(state_digest(ab), state_digest(ba));
  }
}

TEST(ExecuteProperties, ShardOnSliceMatchesWholeBlock) {
  std::mt19937_64 rng(321);
  for (int iter = 0; iter < 100; ++iter) {
    auto txns = random_block(rng, 40, 60);
    auto s = funded_state(txns);
    auto whole = execute_shard(txns, s, kFree);
    for (const auto& sh : analyze(txns).shards) {
      std::vector<Transaction> part;
      std::set<Address> addrs;
      for (auto id : sh.tx_ids) {
        part.push_back(txns[id]);
        for (const auto& a : touched_addresses_lenient(txns[id])) addrs.insert(a);
      }
      auto r = execute_shard(part, s.slice(addrs), kFree, {.strict_slice = true});
      for (const auto& a : addrs) ASSERT_EQ(r.state.get(a), whole.state.get(a));
      for (std::size_t k = 0; k < part.size(); ++k) ASSERT_EQ(r.outcomes[k], whole.outcomes[sh.tx_ids[k]]);
    }
  }
}

TEST(SyntheticCost, BurnsRoughlyTheConfiguredTime) {
  SyntheticCost cost{std::chrono::microseconds(2000), std::chrono::microseconds(0), CostMode::Spin};
  auto tx = call(0, addr(1), contract_addr(1), Function::PublicMine, {});
  auto t0 = std::chrono::steady_clock::now();
  cost.burn(tx);
  auto spent = std::chrono::steady_clock::now() - t0;
  EXPECT_GE(spent, std::chrono::microseconds(2000));
  cost.mode = CostMode::Sleep;
  t0 = std::chrono::steady_clock::now();
  cost.burn(tx);
  EXPECT_GE(std::chrono::steady_clock::now() - t0, std::chrono::microseconds(2000));
}
