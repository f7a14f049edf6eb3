#include "physaug/socket.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "physaug/batch_frame.hpp"
#include "physaug/errors.hpp"

namespace physaug::net {

namespace {

sockaddr_in loopback(std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  return addr;
}

std::string errno_text() { return std::strerror(errno); }

// Returns bytes read; 0 only at EOF.
std::size_t read_some(const Socket& s, std::uint8_t* dst, std::size_t n) {
  while (true) {
    const ssize_t r = ::recv(s.fd(), dst, n, 0);
    if (r >= 0) return static_cast<std::size_t>(r);
    if (errno == EINTR) continue;
    if (errno == ECONNRESET) return 0;
    throw IoError("recv failed: " + errno_text());
  }
}

// False on EOF before the first byte; throws on EOF in the middle.
bool read_exact(const Socket& s, std::uint8_t* dst, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const std::size_t r = read_some(s, dst + got, n - got);
    if (r == 0) {
      if (got == 0) return false;
      throw FrameError(FrameErrorKind::Truncated, "connection closed mid-message");
    }
    got += r;
  }
  return true;
}

}  // namespace

Socket& Socket::operator=(Socket&& o) noexcept {
  if (this != &o) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = o.release();
  }
  return *this;
}

Socket::~Socket() {
  if (fd_ >= 0) ::close(fd_);
}

int Socket::release() {
  const int fd = fd_;
  fd_ = -1;
  return fd;
}

Socket listen_local(std::uint16_t port) {
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw IoError("socket failed: " + errno_text());
  const sockaddr_in addr = loopback(port);
  if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    throw IoError("cannot bind 127.0.0.1:" + std::to_string(port) + ": " + errno_text());
  }
  if (::listen(s.fd(), 1) != 0) throw IoError("listen failed: " + errno_text());
  return s;
}

std::uint16_t local_port(const Socket& s) {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  if (::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    throw IoError("getsockname failed: " + errno_text());
  }
  return ntohs(addr.sin_port);
}

Socket accept_client(const Socket& listener) {
  while (true) {
    const int fd = ::accept(listener.fd(), nullptr, nullptr);
    if (fd >= 0) return Socket(fd);
    if (errno != EINTR) throw IoError("accept failed: " + errno_text());
  }
}

Socket connect_local(std::uint16_t port) {
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw IoError("socket failed: " + errno_text());
  const sockaddr_in addr = loopback(port);
  if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    throw IoError("cannot connect to 127.0.0.1:" + std::to_string(port) + ": " + errno_text());
  }
  return s;
}

bool write_all(const Socket& s, std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t r = ::send(s.fd(), bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE || errno == ECONNRESET) return false;
      throw IoError("send failed: " + errno_text());
    }
    sent += static_cast<std::size_t>(r);
  }
  return true;
}

std::optional<std::vector<std::uint8_t>> read_message(const Socket& s) {
  std::uint8_t prefix[4];
  if (!read_exact(s, prefix, 4)) return std::nullopt;
  const std::uint32_t len = static_cast<std::uint32_t>(prefix[0]) | (static_cast<std::uint32_t>(prefix[1]) << 8) |
                            (static_cast<std::uint32_t>(prefix[2]) << 16) |
                            (static_cast<std::uint32_t>(prefix[3]) << 24);
  if (len > dataio::kMaxMessageBytes) throw FrameError(FrameErrorKind::Oversized, "message length exceeds limit");
  std::vector<std::uint8_t> body(len);
  if (len > 0 && !read_exact(s, body.data(), len)) {
    throw FrameError(FrameErrorKind::Truncated, "connection closed mid-message");
  }
  return body;
}

void shutdown_write(const Socket& s) { ::shutdown(s.fd(), SHUT_WR); }

bool readable(const Socket& s, std::chrono::milliseconds timeout) {
  pollfd p{s.fd(), POLLIN, 0};
  const int r = ::poll(&p, 1, static_cast<int>(timeout.count()));
  if (r < 0) {
    if (errno == EINTR) return false;
    throw IoError("poll failed: " + errno_text());
  }
  return r > 0 && (p.revents & (POLLIN | POLLHUP | POLLERR)) != 0;
}

}  // namespace physaug::net
