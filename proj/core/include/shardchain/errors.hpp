#pragma once

#include <stdexcept>
#include <string>

namespace shardchain {

/// Malformed bytes: canonical encodings, ABI parameters, hex strings.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated framing or message rules on a community connection.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The underlying byte stream failed or was closed by the peer.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeoutError : public TransportError {
 public:
  using TransportError::TransportError;
};

/// A follower failed to answer an execution request. No partial merge
/// has been applied when this is thrown.
class DispatchError : public std::runtime_error {
 public:
  DispatchError(unsigned follower_id, const std::string& what)
      : std::runtime_error("follower " + std::to_string(follower_id) + ": " + what),
        follower_id_(follower_id) {}

  unsigned follower_id() const noexcept { return follower_id_; }

 private:
  unsigned follower_id_;
};

/// Two follower responses claimed the same account.
class MergeConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidUncles : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The nonce search wrapped past 2^64 without a solution.
class Exhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shardchain
