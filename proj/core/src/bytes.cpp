#include "shardchain/bytes.hpp"

#include <algorithm>

#include "shardchain/errors.hpp"

namespace shardchain {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteSpan bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view text) {
  if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
  if (text.size() % 2 != 0) throw DecodeError("hex string has odd length");
  Bytes out(text.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(text[2 * i]);
    int lo = hex_value(text[2 * i + 1]);
    if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::string wei_to_string(Wei value) {
  if (value == 0) return "0";
  std::string out;
  while (value != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

Wei parse_wei(std::string_view text) {
  if (text.empty()) throw DecodeError("empty amount");
  constexpr Wei kMax = ~static_cast<Wei>(0);
  Wei value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw DecodeError("invalid decimal digit in amount");
    auto digit = static_cast<Wei>(c - '0');
    if (value > (kMax - digit) / 10) throw DecodeError("amount exceeds 128 bits");
    value = value * 10 + digit;
  }
  return value;
}

template <std::size_t N>
FixedBytes<N> FixedBytes<N>::from_span(ByteSpan src) {
  if (src.size() != N) throw DecodeError("fixed-width field has wrong length");
  FixedBytes<N> out;
  std::copy(src.begin(), src.end(), out.bytes.begin());
  return out;
}

template <std::size_t N>
FixedBytes<N> FixedBytes<N>::parse(std::string_view text) {
  auto digits = text;
  if (digits.starts_with("0x") || digits.starts_with("0X")) digits.remove_prefix(2);
  if (digits.size() != 2 * N)
    throw DecodeError("expected " + std::to_string(2 * N) + " hex digits");
  auto raw = from_hex(digits);
  return from_span(raw);
}

template struct FixedBytes<20>;
template struct FixedBytes<32>;

Address Address::from_index(std::uint64_t index, std::uint8_t tag) {
  Address a;
  a.bytes[0] = tag;
  for (int i = 0; i < 8; ++i) a.bytes[19 - i] = static_cast<std::uint8_t>(index >> (8 * i));
  return a;
}

Word word_from_wei(Wei value) {
  Word w;
  for (int i = 0; i < 16; ++i) w.bytes[31 - i] = static_cast<std::uint8_t>(value >> (8 * i));
  return w;
}

Wei wei_from_word(const Word& word) {
  for (int i = 0; i < 16; ++i)
    if (word.bytes[i] != 0) throw DecodeError("value exceeds 128 bits");
  Wei v = 0;
  for (int i = 16; i < 32; ++i) v = (v << 8) | word.bytes[i];
  return v;
}

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 7; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u128(Wei v) {
  for (int i = 15; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::blob(ByteSpan bytes) {
  count(bytes.size());
  raw(bytes);
}

void ByteWriter::count(std::size_t n) {
  if (n > 0xffffffffULL) throw std::length_error("list longer than u32 count");
  u32(static_cast<std::uint32_t>(n));
}

ByteSpan ByteReader::raw(std::size_t n) {
  if (n > remaining()) throw DecodeError("unexpected end of input");
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint32_t ByteReader::u32() {
  auto b = raw(4);
  std::uint32_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t ByteReader::u64() {
  auto b = raw(8);
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

Wei ByteReader::u128() {
  auto b = raw(16);
  Wei v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

Bytes ByteReader::blob() {
  auto n = u32();
  auto b = raw(n);
  return Bytes(b.begin(), b.end());
}

std::uint32_t ByteReader::count(std::size_t min_element_size) {
  auto n = u32();
  if (min_element_size > 0 && n > remaining() / min_element_size)
    throw DecodeError("list count exceeds remaining input");
  return n;
}

void ByteReader::expect_done() const {
  if (!done()) throw DecodeError("trailing bytes after value");
}

}  // namespace shardchain
