#include "shardchain/pow.hpp"

#include <cmath>
#include <stdexcept>

#include "shardchain/codec.hpp"
#include "shardchain/errors.hpp"

namespace shardchain {

Target::Target(const Hash256& value) : value_(value) {
  if (value_.is_zero()) throw std::invalid_argument("proof-of-work target must be positive");
}

Target Target::max() {
  Hash256 v;
  v.bytes.fill(0xff);
  return Target(v);
}

Target Target::pow2(unsigned exponent) {
  if (exponent > 255) throw std::invalid_argument("target exponent must be below 256");
  Hash256 v;
  v.bytes[31 - exponent / 8] = static_cast<std::uint8_t>(1u << (exponent % 8));
  return Target(v);
}

Target Target::parse(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty() || hex.size() > 64) throw DecodeError("target must have 1 to 64 hex digits");
  std::string padded(64 - hex.size(), '0');
  padded.append(hex);
  return Target(Hash256::parse(padded));
}

double Target::expected_attempts() const {
  double t = 0;
  for (auto b : value_.bytes) t = t * 256.0 + b;
  return std::ldexp(1.0, 256) / t;
}

bool check_pow(const Block& block, const Target& target) { return target.accepts(block_hash(block)); }

NonceHasher::NonceHasher(const Block& block) {
  prefix_.update(canonical_encode(block, false));
}

Hash256 NonceHasher::hash(std::uint64_t nonce) {
  std::uint8_t be[8];
  for (int i = 0; i < 8; ++i) be[i] = static_cast<std::uint8_t>(nonce >> (56 - 8 * i));
  scratch_.copy_from(prefix_);
  scratch_.update(ByteSpan(be, 8));
  return scratch_.finish();
}

SearchResult search_nonce(const Block& block, const Target& target, SearchPartition part, std::stop_token cancel) {
  if (!part.valid()) throw std::invalid_argument("search partition needs 0 <= start < stride");
  SearchResult result;
  if (cancel.stop_requested()) return result;

  NonceHasher hasher(block);
  std::uint64_t nonce = part.start;
  std::uint64_t until_poll = kCancelPollInterval;
  for (;;) {
    ++result.attempts;
    if (target.accepts(hasher.hash(nonce))) {
      result.nonce = nonce;
      return result;
    }
    if (--until_poll == 0) {
      if (cancel.stop_requested()) return result;
      until_poll = kCancelPollInterval;
    }
    if (nonce > UINT64_MAX - part.stride) throw Exhausted("nonce space exhausted");
    nonce += part.stride;
  }
}

}  // namespace shardchain
