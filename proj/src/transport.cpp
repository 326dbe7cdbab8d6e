// Copyright 2026 The garena Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// POSIX TCP sockets carrying newline-delimited lines.

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include <fmt/format.h>

#include "garena/protocol.hpp"

namespace garena::protocol {

namespace {

constexpr std::size_t kMaxLineBytes = 4 << 20;

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head != nullptr) freeaddrinfo(head);
  }
};

void resolve(const Endpoint& ep, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  const std::string port = std::to_string(ep.port);
  const char* host = ep.host.empty() ? nullptr : ep.host.c_str();
  if (int rc = getaddrinfo(host, port.c_str(), &hints, &out.head); rc != 0) {
    throw TransportError(fmt::format("cannot resolve {}:{}: {}", ep.host, ep.port,
                                     gai_strerror(rc)));
  }
}

}  // namespace

SocketChannel::~SocketChannel() { close(); }

void SocketChannel::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

void SocketChannel::send_line(std::string_view line) {
  if (fd_ < 0) throw TransportError("socket closed");
  std::string data(line);
  data.push_back('\n');
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(fmt::format("send failed: {}", std::strerror(errno)));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> SocketChannel::recv_line(Millis timeout) {
  using Clock = std::chrono::steady_clock;
  const auto until = Clock::now() + timeout;
  while (true) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (fd_ < 0) throw TransportError("socket closed");
    if (buffer_.size() > kMaxLineBytes) throw TransportError("line too long");
    const auto left = std::chrono::ceil<Millis>(until - Clock::now());
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(std::max<Millis::rep>(0, left.count())));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw TransportError(fmt::format("poll failed: {}", std::strerror(errno)));
    }
    if (rc == 0) return std::nullopt;
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw TransportError(fmt::format("recv failed: {}", std::strerror(errno)));
    }
    if (n == 0) throw TransportError("peer closed the connection");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

Endpoint parse_endpoint(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) {
    throw ConfigError(fmt::format("address '{}' must be host:port", text));
  }
  Endpoint ep;
  ep.host = std::string(text.substr(0, colon));
  if (ep.host.empty()) ep.host = "0.0.0.0";
  const auto port = text.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), ep.port);
  if (ec != std::errc{} || ptr != port.data() + port.size() || ep.port < 0 ||
      ep.port > 65535) {
    throw ConfigError(fmt::format("bad port in '{}'", text));
  }
  return ep;
}

TcpListener::TcpListener(const Endpoint& endpoint) {
  AddrInfo info;
  try {
    resolve(endpoint, true, info);
  } catch (const TransportError& e) {
    throw BindError(e.what());
  }
  std::string last_error = "no usable address";
  for (addrinfo* ai = info.head; ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
      fd_ = fd;
      break;
    }
    last_error = std::strerror(errno);
    ::close(fd);
  }
  if (fd_ < 0) {
    throw BindError(fmt::format("cannot listen on {}:{}: {}", endpoint.host,
                                endpoint.port, last_error));
  }
  sockaddr_storage addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  if (addr.ss_family == AF_INET) {
    port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  } else {
    port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  }
}

TcpListener::~TcpListener() { close(); }

void TcpListener::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

std::unique_ptr<SocketChannel> TcpListener::accept(Millis timeout) {
  if (fd_ < 0) return nullptr;
  pollfd pfd{fd_, POLLIN, 0};
  const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (rc <= 0) return nullptr;
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) return nullptr;
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return std::make_unique<SocketChannel>(fd);
}

std::unique_ptr<SocketChannel> connect_tcp(const Endpoint& endpoint) {
  AddrInfo info;
  resolve(endpoint, false, info);
  std::string last_error = "no usable address";
  for (addrinfo* ai = info.head; ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return std::make_unique<SocketChannel>(fd);
    }
    last_error = std::strerror(errno);
    ::close(fd);
  }
  throw TransportError(fmt::format("cannot connect to {}:{}: {}", endpoint.host,
                                   endpoint.port, last_error));
}

}  // namespace garena::protocol
