#pragma once

#include <cstdint>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>

#include "shardchain/hash.hpp"
#include "shardchain/types.hpp"

namespace shardchain {

/// Proof-of-work threshold: a block is sealed when its hash, read as a
/// 256-bit big-endian integer, is strictly below the target.
class Target {
 public:
  /// Throws std::invalid_argument for a zero target.
  explicit Target(const Hash256& value);

  static Target max();
  /// 2^exponent for exponent in [0, 255].
  static Target pow2(unsigned exponent);
  /// Up to 64 hex digits, optional 0x prefix, left-padded with zeros.
  static Target parse(std::string_view hex);

  const Hash256& value() const { return value_; }
  std::string hex() const { return value_.hex(); }
  bool accepts(const Hash256& hash) const { return hash < value_; }
  /// 2^256 / target.
  double expected_attempts() const;

  bool operator==(const Target&) const = default;

 private:
  Hash256 value_;
};

/// Nonce residue class {start + k * stride}.
struct SearchPartition {
  std::uint64_t start = 0;
  std::uint64_t stride = 1;

  bool valid() const { return stride > 0 && start < stride; }
};

bool check_pow(const Block& block, const Target& target);

/// Hashes the nonce-less prefix once; each candidate nonce then costs one
/// context copy plus an 8-byte update.
class NonceHasher {
 public:
  explicit NonceHasher(const Block& block);
  Hash256 hash(std::uint64_t nonce);

 private:
  Sha256 prefix_;
  Sha256 scratch_;
};

struct SearchResult {
  std::optional<std::uint64_t> nonce;
  std::uint64_t attempts = 0;
};

inline constexpr std::uint64_t kCancelPollInterval = 1024;

/// Walks start, start+stride, ... and returns the first nonce whose block
/// hash meets the target, or no nonce once `cancel` is observed. The token is
/// checked before the first hash and at least every kCancelPollInterval
/// attempts. Throws Exhausted if the class runs past 2^64 - 1.
SearchResult search_nonce(const Block& block, const Target& target, SearchPartition part, std::stop_token cancel = {});

}  // namespace shardchain
