#include "shardchain/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace shardchain {

struct Sha256::Ctx {
  EVP_MD_CTX* md = nullptr;

  Ctx() : md(EVP_MD_CTX_new()) {
    if (md == nullptr) throw std::bad_alloc();
  }
  ~Ctx() { EVP_MD_CTX_free(md); }
  Ctx(const Ctx&) = delete;
  Ctx& operator=(const Ctx&) = delete;
};

namespace {

void check(int rc, const char* what) {
  if (rc != 1) throw std::runtime_error(std::string("openssl: ") + what);
}

// Fetched once; passing EVP_sha256() to every init repeats the provider lookup.
const EVP_MD* sha256_md() {
  static const EVP_MD* md = [] {
    EVP_MD* m = EVP_MD_fetch(nullptr, "SHA256", nullptr);
    if (m == nullptr) throw std::runtime_error("openssl: SHA256 unavailable");
    return m;
  }();
  return md;
}

struct ThreadCtx {
  EVP_MD_CTX* md = EVP_MD_CTX_new();
  ~ThreadCtx() { EVP_MD_CTX_free(md); }
};

Hash256 one_shot(const void* data, std::size_t size) {
  thread_local ThreadCtx ctx;
  if (ctx.md == nullptr) throw std::bad_alloc();
  Hash256 out;
  unsigned int len = 0;
  check(EVP_DigestInit_ex(ctx.md, sha256_md(), nullptr), "digest init");
  check(EVP_DigestUpdate(ctx.md, data, size), "digest update");
  check(EVP_DigestFinal_ex(ctx.md, out.bytes.data(), &len), "digest final");
  return out;
}

}  // namespace

Sha256::Sha256() : ctx_(std::make_unique<Ctx>()) {
  check(EVP_DigestInit_ex(ctx_->md, sha256_md(), nullptr), "digest init");
}

Sha256::Sha256(const Sha256& other) : ctx_(std::make_unique<Ctx>()) { copy_from(other); }

Sha256& Sha256::operator=(const Sha256& other) {
  if (this != &other) {
    if (!ctx_) ctx_ = std::make_unique<Ctx>();
    copy_from(other);
  }
  return *this;
}

Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;
Sha256::~Sha256() = default;

void Sha256::copy_from(const Sha256& other) {
  check(EVP_MD_CTX_copy_ex(ctx_->md, other.ctx_->md), "digest copy");
}

Sha256& Sha256::update(ByteSpan data) {
  check(EVP_DigestUpdate(ctx_->md, data.data(), data.size()), "digest update");
  return *this;
}

Sha256& Sha256::update(std::string_view data) {
  check(EVP_DigestUpdate(ctx_->md, data.data(), data.size()), "digest update");
  return *this;
}

Hash256 Sha256::finish() {
  Hash256 out;
  unsigned int len = 0;
  check(EVP_DigestFinal_ex(ctx_->md, out.bytes.data(), &len), "digest final");
  return out;
}

Hash256 sha256(ByteSpan data) { return one_shot(data.data(), data.size()); }

Hash256 sha256(std::string_view data) { return one_shot(data.data(), data.size()); }

}  // namespace shardchain
