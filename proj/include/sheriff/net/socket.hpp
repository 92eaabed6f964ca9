#pragma once

#include "sheriff/core/errors.hpp"
#include "sheriff/core/time.hpp"

#include <json.hpp>

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>

namespace sheriff::net {

class ConnectionClosed : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::uint32_t kMaxFrameBytes = 64u << 20;

// Owning TCP socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  // Wakes any thread blocked on the socket; the descriptor stays owned.
  void shutdown();
  void close();

 private:
  int fd_ = -1;
};

// Throws ConnectionClosed when the peer cannot be reached in time.
Socket connect_tcp(const std::string& host, int port, Millis timeout);
// Listening socket; *bound_port receives the actual port when 0 is given.
Socket listen_tcp(const std::string& address, int port, int* bound_port);
// Waits up to `timeout` for a connection; an invalid socket on timeout.
Socket accept_tcp(const Socket& listener, Millis timeout);

// 4-byte big-endian length followed by that many bytes of UTF-8 JSON.
std::string encode_frame(const nlohmann::json& message);

// Serializes writers on one connection.
class FrameWriter {
 public:
  explicit FrameWriter(int fd) : fd_(fd) {}
  // Throws ConnectionClosed.
  void send(const nlohmann::json& message);

 private:
  int fd_;
  std::mutex mu_;
};

// Reassembles frames across partial reads. Single reader per connection.
class FrameReader {
 public:
  explicit FrameReader(int fd) : fd_(fd) {}
  // nullopt on timeout. Throws ConnectionClosed on EOF and ProtocolError on
  // oversized or malformed frames.
  std::optional<nlohmann::json> next(Millis timeout);

 private:
  std::optional<nlohmann::json> take();

  int fd_;
  std::string buffer_;
};

}  // namespace sheriff::net
