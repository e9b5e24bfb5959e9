#include "islesim/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

namespace islesim {

void write_frame(Stream& s, const Message& msg) {
  auto bytes = encode_frame(msg);
  s.write_all(bytes.data(), bytes.size());
}

std::optional<Message> read_frame(Stream& s, double timeout_s) {
  std::uint8_t head[4];
  if (!s.read_exact(head, 4, timeout_s)) return std::nullopt;
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(head[i]) << (8 * i);
  if (len == 0 || len > kMaxFrameLen)
    throw ProtocolError("invalid frame length on stream");
  std::vector<std::uint8_t> buf(4 + len);
  std::memcpy(buf.data(), head, 4);
  if (!s.read_exact(buf.data() + 4, len, timeout_s))
    throw TransportError("connection closed inside a frame");
  DecodeResult r = decode_frame(buf);
  if (!r.ok()) throw ProtocolError("malformed frame: " + r.error);
  return *r.msg;
}

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw TransportError(what + ": " + std::strerror(errno));
}

sockaddr_in parse_address(const std::string& address) {
  auto colon = address.rfind(':');
  if (colon == std::string::npos)
    throw TransportError("address must be host:port, got " + address);
  std::string host = address.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(address.substr(colon + 1));
  } catch (const std::exception&) {
    throw TransportError("bad port in address " + address);
  }
  if (port < 0 || port > 65535) throw TransportError("port out of range");
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(static_cast<std::uint16_t>(port));
  if (host.empty()) host = "127.0.0.1";
  if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1)
    throw TransportError("cannot parse IPv4 host " + host);
  return sa;
}

std::string format_address(const sockaddr_in& sa) {
  char buf[INET_ADDRSTRLEN] = {};
  inet_ntop(AF_INET, &sa.sin_addr, buf, sizeof buf);
  return std::string(buf) + ":" + std::to_string(ntohs(sa.sin_port));
}

class TcpStream final : public Stream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpStream() override { close(); }

  bool read_exact(std::uint8_t* buf, std::size_t n, double timeout_s) override {
    std::size_t got = 0;
    while (got < n) {
      pollfd pfd{fd_, POLLIN, 0};
      int pr = ::poll(&pfd, 1, static_cast<int>(timeout_s * 1000.0));
      if (pr == 0) throw TransportError("read timeout");
      if (pr < 0) {
        if (errno == EINTR) continue;
        throw_errno("poll");
      }
      ssize_t r = ::recv(fd_, buf + got, n - got, 0);
      if (r == 0) {
        if (got == 0) return false;
        throw TransportError("connection closed mid-read");
      }
      if (r < 0) {
        if (errno == EINTR) continue;
        throw_errno("recv");
      }
      got += static_cast<std::size_t>(r);
    }
    return true;
  }

  void write_all(const std::uint8_t* buf, std::size_t n) override {
    std::size_t sent = 0;
    while (sent < n) {
      ssize_t w = ::send(fd_, buf + sent, n - sent, MSG_NOSIGNAL);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw_errno("send");
      }
      sent += static_cast<std::size_t>(w);
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
};

}  // namespace

std::unique_ptr<Stream> tcp_connect(const std::string& address, double timeout_s) {
  sockaddr_in sa = parse_address(address);
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw_errno("socket");
  // Retry briefly: the peer may still be binding its listener.
  const int attempts = std::max(1, static_cast<int>(timeout_s * 20.0));
  for (int i = 0;; ++i) {
    if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa) == 0) break;
    if (i + 1 >= attempts) {
      int e = errno;
      ::close(fd);
      errno = e;
      throw_errno("connect to " + address);
    }
    ::usleep(50 * 1000);
  }
  return std::make_unique<TcpStream>(fd);
}

TcpListener::TcpListener(const std::string& address) {
  sockaddr_in sa = parse_address(address);
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw_errno("socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0)
    throw_errno("bind " + address);
  if (::listen(fd_, 1) != 0) throw_errno("listen");
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len) != 0)
    throw_errno("getsockname");
  local_address_ = format_address(bound);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Stream> TcpListener::accept(double timeout_s) {
  pollfd pfd{fd_, POLLIN, 0};
  int pr = ::poll(&pfd, 1, static_cast<int>(timeout_s * 1000.0));
  if (pr == 0) throw TransportError("accept timeout");
  if (pr < 0) throw_errno("poll");
  int cfd = ::accept(fd_, nullptr, nullptr);
  if (cfd < 0) throw_errno("accept");
  return std::make_unique<TcpStream>(cfd);
}

namespace {

struct PipeBuffer {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> data;
  bool closed = false;
};

class MemoryStream final : public Stream {
 public:
  MemoryStream(std::shared_ptr<PipeBuffer> rx, std::shared_ptr<PipeBuffer> tx)
      : rx_(std::move(rx)), tx_(std::move(tx)) {}
  ~MemoryStream() override { close(); }

  bool read_exact(std::uint8_t* buf, std::size_t n, double timeout_s) override {
    std::unique_lock lk(rx_->mu);
    std::size_t got = 0;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(timeout_s));
    while (got < n) {
      if (!rx_->data.empty()) {
        buf[got++] = rx_->data.front();
        rx_->data.pop_front();
        continue;
      }
      if (rx_->closed) {
        if (got == 0) return false;
        throw TransportError("pipe closed mid-read");
      }
      if (rx_->cv.wait_until(lk, deadline) == std::cv_status::timeout)
        throw TransportError("read timeout");
    }
    return true;
  }

  void write_all(const std::uint8_t* buf, std::size_t n) override {
    std::lock_guard lk(tx_->mu);
    if (tx_->closed) throw TransportError("pipe closed");
    tx_->data.insert(tx_->data.end(), buf, buf + n);
    tx_->cv.notify_all();
  }

  void close() override {
    for (auto& b : {rx_, tx_}) {
      std::lock_guard lk(b->mu);
      b->closed = true;
      b->cv.notify_all();
    }
  }

 private:
  std::shared_ptr<PipeBuffer> rx_, tx_;
};

}  // namespace

std::pair<std::unique_ptr<Stream>, std::unique_ptr<Stream>> make_memory_pipe() {
  auto a = std::make_shared<PipeBuffer>();
  auto b = std::make_shared<PipeBuffer>();
  return {std::make_unique<MemoryStream>(a, b),
          std::make_unique<MemoryStream>(b, a)};
}

}  // namespace islesim
