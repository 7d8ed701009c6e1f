#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "shardchain/bytes.hpp"
#include "shardchain/wire.hpp"

namespace shardchain {

using Clock = std::chrono::steady_clock;
using Deadline = std::optional<Clock::time_point>;

/// Reliable, ordered byte stream. Implementations must allow close() from
/// any thread to unblock a concurrent reader.
class Stream {
 public:
  virtual ~Stream() = default;

  /// Throws TransportError when the stream is closed or broken.
  virtual void write_all(ByteSpan data) = 0;
  /// Blocks until at least one byte is available; returns 0 at end of
  /// stream. Throws TimeoutError past `deadline`.
  virtual std::size_t read_some(std::span<std::uint8_t> out, Deadline deadline) = 0;
  virtual void close() = 0;
};

using StreamPtr = std::unique_ptr<Stream>;

/// Two connected in-memory endpoints.
std::pair<StreamPtr, StreamPtr> make_memory_pipe();

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  /// "host:port"
  static Endpoint parse(const std::string& text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

StreamPtr connect_tcp(const Endpoint& ep, std::chrono::milliseconds timeout = std::chrono::seconds(10));

class TcpListener {
 public:
  /// Port 0 binds an ephemeral port.
  explicit TcpListener(const Endpoint& ep);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  StreamPtr accept();
  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Fills `out` completely. End of stream before the first byte throws
/// TransportError; end of stream part-way throws ProtocolError when
/// `mid_frame` is set, TransportError otherwise.
void read_exact(Stream& s, std::span<std::uint8_t> out, Deadline deadline, bool mid_frame);

/// Reads one frame. A clean end of stream at a frame boundary throws
/// TransportError; truncated or oversized frames throw ProtocolError.
Frame read_frame(Stream& s, Deadline deadline = std::nullopt);
void write_frame(Stream& s, std::uint64_t request_id, const Message& msg);

}  // namespace shardchain
