#pragma once

#include <memory>
#include <string>
#include <utility>

#include "islesim/protocol.hpp"

namespace islesim {

/// Reliable ordered byte stream; the protocol layers on top of this, so
/// sessions behave identically over TCP and in-memory pipes.
class Stream {
 public:
  virtual ~Stream() = default;

  /// Reads exactly n bytes. Throws TransportError on timeout or on a
  /// connection closed mid-read. Returns false only on a clean close
  /// before the first byte.
  virtual bool read_exact(std::uint8_t* buf, std::size_t n, double timeout_s) = 0;

  virtual void write_all(const std::uint8_t* buf, std::size_t n) = 0;

  virtual void close() = 0;
};

void write_frame(Stream& s, const Message& msg);

/// Reads one complete frame and decodes it. Returns nullopt on clean EOF
/// at a frame boundary. Throws ProtocolError on malformed frames and
/// TransportError on transport failures.
std::optional<Message> read_frame(Stream& s, double timeout_s);

/// Connects to "host:port". Throws TransportError.
std::unique_ptr<Stream> tcp_connect(const std::string& address, double timeout_s);

class TcpListener {
 public:
  /// Binds and listens on "host:port"; port 0 picks an ephemeral port.
  explicit TcpListener(const std::string& address);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  /// The actually bound address, e.g. "127.0.0.1:45123".
  std::string local_address() const { return local_address_; }

  std::unique_ptr<Stream> accept(double timeout_s);

 private:
  int fd_ = -1;
  std::string local_address_;
};

/// Two connected in-memory streams (a full duplex pipe) for in-process
/// sessions and transport-agnosticism tests.
std::pair<std::unique_ptr<Stream>, std::unique_ptr<Stream>> make_memory_pipe();

}  // namespace islesim
