#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace physaug::net {

/// Owning file descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(o.release()) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release();

 private:
  int fd_ = -1;
};

/// Listening TCP socket on 127.0.0.1. Port 0 picks an ephemeral port.
/// Throws IoError if the port is taken.
Socket listen_local(std::uint16_t port);
std::uint16_t local_port(const Socket& s);
Socket accept_client(const Socket& listener);
Socket connect_local(std::uint16_t port);

/// Returns false if the peer closed the connection.
bool write_all(const Socket& s, std::span<const std::uint8_t> bytes);
/// Reads one u32-length-prefixed message body; nullopt on orderly EOF.
/// Throws FrameError on an oversized length or a mid-message EOF.
std::optional<std::vector<std::uint8_t>> read_message(const Socket& s);
/// Half-closes the sending side so the peer reads EOF.
void shutdown_write(const Socket& s);
/// True if data (or EOF) is ready to read within `timeout`.
bool readable(const Socket& s, std::chrono::milliseconds timeout);

}  // namespace physaug::net
