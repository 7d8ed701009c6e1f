#pragma once

#include <memory>

#include "shardchain/bytes.hpp"

namespace shardchain {

/// Incremental SHA-256. Copyable so that a shared prefix can be hashed once
/// and then extended many times (the nonce search relies on this).
class Sha256 {
 public:
  Sha256();
  Sha256(const Sha256& other);
  Sha256& operator=(const Sha256& other);
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;
  ~Sha256();

  Sha256& update(ByteSpan data);
  Sha256& update(std::string_view data);
  /// Finalizes the digest. Reassign before reusing the object.
  Hash256 finish();

  /// Overwrites this context with `other` without reallocating.
  void copy_from(const Sha256& other);

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

Hash256 sha256(ByteSpan data);
Hash256 sha256(std::string_view data);

}  // namespace shardchain
