#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "shardchain/bytes.hpp"

namespace shardchain {

/// The eleven natively implemented contract functions.
enum class Function : std::uint8_t {
  Transfer,
  Approve,
  Vote,
  SubmitTransaction,
  Issue,
  Callback,
  PlayerRollDice,
  Multisend,
  SmartAirdrop,
  PublicMine,
  SetGenesisAddress,
};

enum class ParamType : std::uint8_t { Address, Uint256, Bytes32, Bytes, String, AddressArray, Uint256Array };

using Selector = std::array<std::uint8_t, 4>;

struct FunctionInfo {
  Function function;
  Selector selector;
  std::string_view name;
  std::span<const ParamType> params;
  /// Observed call count in the mainnet sample; drives workload synthesis.
  std::uint64_t frequency;
};

std::span<const FunctionInfo> function_registry();
const FunctionInfo& function_info(Function f);
const FunctionInfo* find_function(ByteSpan input);
std::string_view param_type_name(ParamType t);

/// uint256 and bytes32 both decode to a raw Word; string decodes to Bytes.
using AbiValue = std::variant<Address, Word, Bytes, std::vector<Address>, std::vector<Word>>;

struct DecodedCall {
  const FunctionInfo* info = nullptr;
  std::vector<AbiValue> args;

  const Address& address_arg(std::size_t i) const { return std::get<Address>(args.at(i)); }
  const Word& word_arg(std::size_t i) const { return std::get<Word>(args.at(i)); }
  /// Throws DecodeError when the uint256 does not fit in 128 bits.
  Wei amount_arg(std::size_t i) const { return wei_from_word(word_arg(i)); }
  const Bytes& bytes_arg(std::size_t i) const { return std::get<Bytes>(args.at(i)); }
};

/// Standard head/tail ABI decoding after the 4-byte selector. Throws
/// DecodeError for unknown selectors, out-of-range offsets, truncated data,
/// and address words with nonzero high bytes.
DecodedCall decode_call(ByteSpan input);

/// Builds calldata; argument kinds must match the function's parameter list.
Bytes encode_call(Function f, const std::vector<AbiValue>& args);

}  // namespace shardchain
