#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shardchain/types.hpp"

namespace shardchain {

enum class CostMode {
  /// Busy loop on the executing thread.
  Spin,
  /// Sleep instead of spinning; models executors on separate machines when
  /// the whole community shares one host.
  Sleep,
};

/// Artificial per-transaction compute cost. Contract calls and monetary
/// transfers have separate cost classes.
struct SyntheticCost {
  std::chrono::microseconds contract{50};
  std::chrono::microseconds monetary{5};
  CostMode mode = CostMode::Spin;

  static SyntheticCost zero() { return {std::chrono::microseconds{0}, std::chrono::microseconds{0}, CostMode::Spin}; }

  void burn(const Transaction& tx) const;
};

enum class ExecStatus : std::uint8_t { Applied = 0, Failed = 1 };

struct ExecOutcome {
  ExecStatus status = ExecStatus::Applied;
  std::optional<std::string> reason;
  /// Accounts read or written, ascending.
  std::vector<Address> touched;

  bool applied() const { return status == ExecStatus::Applied; }
  bool operator==(const ExecOutcome&) const = default;
};

/// Raised in strict-slice mode when execution reaches an account the state
/// slice does not carry.
class SliceMiss : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ExecOptions {
  /// Reject access to accounts not explicitly present in the state.
  bool strict_slice = false;
};

/// Applies one transaction. A Failed outcome leaves `state` untouched.
ExecOutcome execute_transaction(const Transaction& tx, WorldState& state, const SyntheticCost& cost,
                                ExecOptions options = {});

struct ShardResult {
  WorldState state;
  std::vector<ExecOutcome> outcomes;
};

/// Serial fold over a private copy of `state`.
ShardResult execute_shard(const std::vector<Transaction>& txns, WorldState state, const SyntheticCost& cost,
                          ExecOptions options = {});

/// Storage slot helpers shared with workload synthesis and tests. Every
/// contract keeps its data in its own account storage.
namespace slots {

Word token_balance(const Address& holder);
Word allowance(const Address& owner, const Address& spender);
Word voted(const Address& voter);
Word tally(const Word& proposal);
Word pending_count();
Word pending_field(std::uint64_t index, std::string_view field);
Word callback(const Word& id);
Word airdrop_claimed(const Address& holder);
Word genesis_field(std::string_view field);

}  // namespace slots

/// 1..6, a pure function of (block number, tx id).
unsigned dice_roll(std::uint64_t block_number, TxId tx_id);

inline constexpr Wei kAirdropAmount = 1000;
inline constexpr Wei kPublicMineAmount = 100;

/// Sum of token balances held under a contract account (for conservation checks).
Wei token_supply(const WorldState& state, const Address& contract, const std::vector<Address>& holders);

}  // namespace shardchain
