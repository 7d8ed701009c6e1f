#include "shardchain/abi.hpp"

#include <algorithm>
#include <stdexcept>

#include "shardchain/errors.hpp"

namespace shardchain {

namespace {

using P = ParamType;

constexpr ParamType kAddrUint[] = {P::Address, P::Uint256};
constexpr ParamType kUint[] = {P::Uint256};
constexpr ParamType kAddrUintBytes[] = {P::Address, P::Uint256, P::Bytes};
constexpr ParamType kCallback[] = {P::Bytes32, P::String, P::Bytes};
constexpr ParamType kMultisend[] = {P::Address, P::AddressArray, P::Uint256Array};

// Selectors and call counts from the most frequent mainnet contract functions.
constexpr FunctionInfo kRegistry[] = {
    {Function::Transfer, {0xa9, 0x05, 0x9c, 0xbb}, "transfer", kAddrUint, 56654},
    {Function::Approve, {0x09, 0x5e, 0xa7, 0xb3}, "approve", kAddrUint, 11799},
    {Function::Vote, {0x01, 0x21, 0xb9, 0x3f}, "vote", kUint, 11509},
    {Function::SubmitTransaction, {0xc6, 0x42, 0x74, 0x74}, "submitTransaction", kAddrUintBytes, 8163},
    {Function::Issue, {0x86, 0x79, 0x04, 0xb4}, "issue", kAddrUint, 5723},
    {Function::Callback, {0x38, 0xbb, 0xfa, 0x50}, "__callback", kCallback, 5006},
    {Function::PlayerRollDice, {0xdc, 0x6d, 0xd1, 0x52}, "playerRollDice", kUint, 4997},
    {Function::Multisend, {0xad, 0x87, 0x33, 0xca}, "multisend", kMultisend, 4822},
    {Function::SmartAirdrop, {0xa8, 0xfa, 0xf6, 0xf0}, "SmartAirdrop", {}, 4467},
    {Function::PublicMine, {0x87, 0xcc, 0xcc, 0xb3}, "PublicMine", {}, 4157},
    {Function::SetGenesisAddress, {0x0d, 0x57, 0x17, 0x42}, "setGenesisAddress", kAddrUintBytes, 3119},
};

bool is_dynamic(ParamType t) {
  return t == P::Bytes || t == P::String || t == P::AddressArray || t == P::Uint256Array;
}

class AbiReader {
 public:
  explicit AbiReader(ByteSpan args) : args_(args) {}

  Word word_at(std::size_t offset) const {
    if (offset > args_.size() || args_.size() - offset < 32) throw DecodeError("abi: truncated word");
    return Word::from_span(args_.subspan(offset, 32));
  }

  std::size_t index_at(std::size_t offset) const {
    auto w = word_at(offset);
    for (int i = 0; i < 24; ++i)
      if (w.bytes[i] != 0) throw DecodeError("abi: offset or length out of range");
    std::uint64_t v = 0;
    for (int i = 24; i < 32; ++i) v = (v << 8) | w.bytes[i];
    if (v > args_.size()) throw DecodeError("abi: offset or length out of range");
    return static_cast<std::size_t>(v);
  }

  static Address to_address(const Word& w) {
    for (int i = 0; i < 12; ++i)
      if (w.bytes[i] != 0) throw DecodeError("abi: address word has dirty high bytes");
    return Address::from_span(std::span(w.bytes).subspan(12));
  }

  Bytes bytes_at(std::size_t offset) const {
    auto len = index_at(offset);
    auto start = offset + 32;
    if (start > args_.size() || args_.size() - start < len) throw DecodeError("abi: truncated bytes");
    auto s = args_.subspan(start, len);
    return Bytes(s.begin(), s.end());
  }

  std::vector<Word> words_at(std::size_t offset) const {
    auto len = index_at(offset);
    if (len > (args_.size() - offset - 32) / 32) throw DecodeError("abi: truncated array");
    std::vector<Word> out;
    out.reserve(len);
    for (std::size_t i = 0; i < len; ++i) out.push_back(word_at(offset + 32 + 32 * i));
    return out;
  }

 private:
  ByteSpan args_;
};

void put_index(Bytes& out, std::size_t v) {
  Word w;
  for (int i = 0; i < 8; ++i) w.bytes[31 - i] = static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i));
  out.insert(out.end(), w.bytes.begin(), w.bytes.end());
}

void put_word(Bytes& out, const Word& w) { out.insert(out.end(), w.bytes.begin(), w.bytes.end()); }

Word address_word(const Address& a) {
  Word w;
  std::copy(a.bytes.begin(), a.bytes.end(), w.bytes.begin() + 12);
  return w;
}

}  // namespace

std::span<const FunctionInfo> function_registry() { return kRegistry; }

const FunctionInfo& function_info(Function f) { return kRegistry[static_cast<std::size_t>(f)]; }

const FunctionInfo* find_function(ByteSpan input) {
  if (input.size() < 4) return nullptr;
  for (const auto& info : kRegistry)
    if (std::equal(info.selector.begin(), info.selector.end(), input.begin())) return &info;
  return nullptr;
}

std::string_view param_type_name(ParamType t) {
  switch (t) {
    case P::Address: return "address";
    case P::Uint256: return "uint256";
    case P::Bytes32: return "bytes32";
    case P::Bytes: return "bytes";
    case P::String: return "string";
    case P::AddressArray: return "address[]";
    case P::Uint256Array: return "uint256[]";
  }
  return "?";
}

DecodedCall decode_call(ByteSpan input) {
  const auto* info = find_function(input);
  if (info == nullptr) throw DecodeError("unregistered function selector");
  AbiReader r(input.subspan(4));
  DecodedCall call{info, {}};
  call.args.reserve(info->params.size());
  std::size_t head = 0;
  for (auto type : info->params) {
    switch (type) {
      case P::Address: call.args.emplace_back(AbiReader::to_address(r.word_at(head))); break;
      case P::Uint256:
      case P::Bytes32: call.args.emplace_back(r.word_at(head)); break;
      case P::Bytes:
      case P::String: call.args.emplace_back(r.bytes_at(r.index_at(head))); break;
      case P::AddressArray: {
        std::vector<Address> addrs;
        for (const auto& w : r.words_at(r.index_at(head))) addrs.push_back(AbiReader::to_address(w));
        call.args.emplace_back(std::move(addrs));
        break;
      }
      case P::Uint256Array: call.args.emplace_back(r.words_at(r.index_at(head))); break;
    }
    head += 32;
  }
  return call;
}

Bytes encode_call(Function f, const std::vector<AbiValue>& args) {
  const auto& info = function_info(f);
  if (args.size() != info.params.size()) throw std::invalid_argument("abi: wrong argument count");
  Bytes out(info.selector.begin(), info.selector.end());
  Bytes tail;
  std::size_t head_size = 32 * args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    auto type = info.params[i];
    const auto& arg = args[i];
    if (!is_dynamic(type)) {
      if (type == P::Address)
        put_word(out, address_word(std::get<Address>(arg)));
      else
        put_word(out, std::get<Word>(arg));
      continue;
    }
    put_index(out, head_size + tail.size());
    if (type == P::Bytes || type == P::String) {
      const auto& b = std::get<Bytes>(arg);
      put_index(tail, b.size());
      tail.insert(tail.end(), b.begin(), b.end());
      tail.resize(tail.size() + (32 - b.size() % 32) % 32, 0);
    } else if (type == P::AddressArray) {
      const auto& v = std::get<std::vector<Address>>(arg);
      put_index(tail, v.size());
      for (const auto& a : v) put_word(tail, address_word(a));
    } else {
      const auto& v = std::get<std::vector<Word>>(arg);
      put_index(tail, v.size());
      for (const auto& w : v) put_word(tail, w);
    }
  }
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace shardchain
