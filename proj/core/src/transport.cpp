#include "shardchain/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include "shardchain/errors.hpp"

namespace shardchain {

namespace {

struct Channel {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> buf;
  bool closed = false;

  void close() {
    {
      std::lock_guard lk(mu);
      closed = true;
    }
    cv.notify_all();
  }
};

class MemoryStream final : public Stream {
 public:
  MemoryStream(std::shared_ptr<Channel> rx, std::shared_ptr<Channel> tx) : rx_(std::move(rx)), tx_(std::move(tx)) {}
  ~MemoryStream() override { close(); }

  void write_all(ByteSpan data) override {
    {
      std::lock_guard lk(tx_->mu);
      if (tx_->closed) throw TransportError("memory pipe closed");
      tx_->buf.insert(tx_->buf.end(), data.begin(), data.end());
    }
    tx_->cv.notify_all();
  }

  std::size_t read_some(std::span<std::uint8_t> out, Deadline deadline) override {
    if (out.empty()) return 0;
    std::unique_lock lk(rx_->mu);
    auto ready = [&] { return !rx_->buf.empty() || rx_->closed; };
    if (deadline) {
      if (!rx_->cv.wait_until(lk, *deadline, ready)) throw TimeoutError("memory pipe read timed out");
    } else {
      rx_->cv.wait(lk, ready);
    }
    auto n = std::min(out.size(), rx_->buf.size());
    std::copy_n(rx_->buf.begin(), n, out.begin());
    rx_->buf.erase(rx_->buf.begin(), rx_->buf.begin() + static_cast<std::ptrdiff_t>(n));
    return n;
  }

  void close() override {
    rx_->close();
    tx_->close();
  }

 private:
  std::shared_ptr<Channel> rx_;
  std::shared_ptr<Channel> tx_;
};

[[noreturn]] void throw_errno(const std::string& what) {
  throw TransportError(what + ": " + std::strerror(errno));
}

class TcpStream final : public Stream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpStream() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void write_all(ByteSpan data) override {
    std::lock_guard lk(write_mu_);
    std::size_t off = 0;
    while (off < data.size()) {
      auto n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw_errno("send");
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::size_t read_some(std::span<std::uint8_t> out, Deadline deadline) override {
    for (;;) {
      int timeout_ms = -1;
      if (deadline) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - Clock::now()).count();
        if (left <= 0) throw TimeoutError("tcp read timed out");
        timeout_ms = static_cast<int>(std::min<long long>(left, 1 << 30));
      }
      pollfd p{fd_, POLLIN, 0};
      int rc = ::poll(&p, 1, timeout_ms);
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw_errno("poll");
      }
      if (rc == 0) throw TimeoutError("tcp read timed out");
      auto n = ::recv(fd_, out.data(), out.size(), 0);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw_errno("recv");
      }
      return static_cast<std::size_t>(n);
    }
  }

  void close() override { ::shutdown(fd_, SHUT_RDWR); }

 private:
  int fd_;
  std::mutex write_mu_;
};

addrinfo* resolve(const Endpoint& ep, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  auto port = std::to_string(ep.port);
  int rc = ::getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0) throw TransportError("resolve " + ep.str() + ": " + ::gai_strerror(rc));
  return res;
}

}  // namespace

std::pair<StreamPtr, StreamPtr> make_memory_pipe() {
  auto a = std::make_shared<Channel>();
  auto b = std::make_shared<Channel>();
  return {std::make_unique<MemoryStream>(a, b), std::make_unique<MemoryStream>(b, a)};
}

Endpoint Endpoint::parse(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 1 == text.size())
    throw ConfigError("endpoint must be host:port, got '" + text + "'");
  Endpoint ep;
  ep.host = text.substr(0, colon);
  unsigned long port = 0;
  try {
    std::size_t used = 0;
    port = std::stoul(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("junk");
  } catch (const std::exception&) {
    throw ConfigError("bad port in endpoint '" + text + "'");
  }
  if (port > 65535) throw ConfigError("port out of range in '" + text + "'");
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

StreamPtr connect_tcp(const Endpoint& ep, std::chrono::milliseconds timeout) {
  auto* res = resolve(ep, false);
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, &::freeaddrinfo);
  int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) throw_errno("socket");
  int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
  if (rc < 0 && errno != EINPROGRESS) {
    ::close(fd);
    throw_errno("connect " + ep.str());
  }
  if (rc < 0) {
    pollfd p{fd, POLLOUT, 0};
    rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    int err = 0;
    socklen_t len = sizeof err;
    ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
    if (rc <= 0 || err != 0) {
      ::close(fd);
      throw TransportError("connect " + ep.str() + ": " + (rc <= 0 ? "timed out" : std::strerror(err)));
    }
  }
  ::fcntl(fd, F_SETFL, flags);
  return std::make_unique<TcpStream>(fd);
}

TcpListener::TcpListener(const Endpoint& ep) {
  auto* res = resolve(ep, true);
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, &::freeaddrinfo);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0) throw_errno("socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd_, res->ai_addr, res->ai_addrlen) < 0) {
    ::close(fd_);
    throw_errno("bind " + ep.str());
  }
  if (::listen(fd_, 16) < 0) {
    ::close(fd_);
    throw_errno("listen");
  }
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

StreamPtr TcpListener::accept() {
  for (;;) {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<TcpStream>(fd);
    if (errno == EINTR) continue;
    throw_errno("accept");
  }
}

void TcpListener::close() { ::shutdown(fd_, SHUT_RDWR); }

void read_exact(Stream& s, std::span<std::uint8_t> out, Deadline deadline, bool mid_frame) {
  std::size_t got = 0;
  while (got < out.size()) {
    auto n = s.read_some(out.subspan(got), deadline);
    if (n == 0) {
      if (got == 0 && !mid_frame) throw TransportError("end of stream");
      throw ProtocolError("truncated frame: stream ended mid-frame");
    }
    got += n;
  }
}

Frame read_frame(Stream& s, Deadline deadline) {
  std::uint8_t len_be[4];
  read_exact(s, len_be, deadline, false);
  std::uint32_t length = (std::uint32_t{len_be[0]} << 24) | (std::uint32_t{len_be[1]} << 16) |
                         (std::uint32_t{len_be[2]} << 8) | len_be[3];
  check_frame_length(length);
  Bytes buf(4 + length);
  std::copy(std::begin(len_be), std::end(len_be), buf.begin());
  read_exact(s, std::span(buf).subspan(4), deadline, true);
  return parse_frame(buf);
}

void write_frame(Stream& s, std::uint64_t request_id, const Message& msg) {
  s.write_all(encode_frame(request_id, msg));
}

}  // namespace shardchain
