#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shardchain {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

/// Amounts in Wei. 128 bits covers every value the workloads produce.
using Wei = unsigned __int128;

inline constexpr Wei kEther = static_cast<Wei>(1'000'000'000'000'000'000ULL);

std::string to_hex(ByteSpan bytes);
/// Accepts an optional 0x prefix; rejects odd lengths and non-hex digits.
Bytes from_hex(std::string_view text);

std::string wei_to_string(Wei value);
/// Decimal only; throws DecodeError on overflow or junk.
Wei parse_wei(std::string_view text);

/// Fixed-width byte string with value semantics and total ordering.
template <std::size_t N>
struct FixedBytes {
  static constexpr std::size_t size = N;
  std::array<std::uint8_t, N> bytes{};

  auto operator<=>(const FixedBytes&) const = default;
  bool operator==(const FixedBytes&) const = default;

  bool is_zero() const {
    for (auto b : bytes)
      if (b != 0) return false;
    return true;
  }

  ByteSpan span() const { return {bytes.data(), N}; }

  std::string hex() const { return "0x" + to_hex(span()); }

  static FixedBytes from_span(ByteSpan src);
  static FixedBytes parse(std::string_view text);
};

struct Address : FixedBytes<20> {
  Address() = default;
  explicit Address(const FixedBytes<20>& raw) : FixedBytes<20>(raw) {}

  static Address from_span(ByteSpan src) { return Address(FixedBytes<20>::from_span(src)); }
  /// Requires exactly 40 hex digits after the optional 0x.
  static Address parse(std::string_view text) { return Address(FixedBytes<20>::parse(text)); }
  /// Deterministic test/workload address: big-endian index in the low bytes.
  static Address from_index(std::uint64_t index, std::uint8_t tag = 0);
};

struct Hash256 : FixedBytes<32> {
  Hash256() = default;
  explicit Hash256(const FixedBytes<32>& raw) : FixedBytes<32>(raw) {}

  static Hash256 from_span(ByteSpan src) { return Hash256(FixedBytes<32>::from_span(src)); }
  static Hash256 parse(std::string_view text) { return Hash256(FixedBytes<32>::parse(text)); }
};

/// 32-byte contract storage key or value.
using Word = Hash256;

Word word_from_wei(Wei value);
/// Throws DecodeError when the upper 16 bytes are not zero.
Wei wei_from_word(const Word& word);

/// Appends big-endian fixed-width integers and raw bytes.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void u128(Wei v);
  void raw(ByteSpan bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
  template <std::size_t N>
  void fixed(const FixedBytes<N>& v) { raw(v.span()); }
  /// u32 length prefix followed by the bytes.
  void blob(ByteSpan bytes);
  void count(std::size_t n);

  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }
  std::size_t size() const { return out_.size(); }

 private:
  Bytes out_;
};

/// Bounds-checked cursor over a byte span. Every read past the end throws
/// DecodeError.
class ByteReader {
 public:
  explicit ByteReader(ByteSpan in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  Wei u128();
  ByteSpan raw(std::size_t n);
  template <std::size_t N>
  FixedBytes<N> fixed() { return FixedBytes<N>::from_span(raw(N)); }
  Address address() { return Address(fixed<20>()); }
  Hash256 hash() { return Hash256(fixed<32>()); }
  Bytes blob();
  /// List count, sanity-checked against the bytes left assuming each
  /// element occupies at least `min_element_size` bytes.
  std::uint32_t count(std::size_t min_element_size);

  std::size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return pos_ == in_.size(); }
  void expect_done() const;

 private:
  ByteSpan in_;
  std::size_t pos_ = 0;
};

}  // namespace shardchain

template <std::size_t N>
struct std::hash<shardchain::FixedBytes<N>> {
  std::size_t operator()(const shardchain::FixedBytes<N>& v) const noexcept {
    // FNV-1a over the tail; addresses and digests are already well mixed.
    std::uint64_t h = 1469598103934665603ULL;
    for (auto b : v.bytes) h = (h ^ b) * 1099511628211ULL;
    return static_cast<std::size_t>(h);
  }
};

template <>
struct std::hash<shardchain::Address> : std::hash<shardchain::FixedBytes<20>> {};
template <>
struct std::hash<shardchain::Hash256> : std::hash<shardchain::FixedBytes<32>> {};
