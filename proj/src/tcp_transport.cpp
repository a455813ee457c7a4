// Copyright 2026 The Tripress Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tripress/tcp_transport.h"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "tripress/error.h"

namespace tripress {
namespace {

Error sys_error(const std::string& what) {
  return Error(ErrorKind::kTransport, what + ": " + std::strerror(errno));
}

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head != nullptr) freeaddrinfo(head);
  }
};

void resolve(const HostAddress& addr, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  std::string port = std::to_string(addr.port);
  int rc = getaddrinfo(addr.host.c_str(), port.c_str(), &hints, &out.head);
  if (rc != 0) {
    throw Error(ErrorKind::kTransport,
                "cannot resolve " + addr.to_string() + ": " + gai_strerror(rc));
  }
}

void write_all(int fd, const char* data, std::size_t n) {
  while (n > 0) {
    ssize_t w = ::send(fd, data, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw sys_error("send failed");
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

// False on clean EOF before the first byte; throws on EOF mid-buffer.
bool read_all(int fd, char* data, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    ssize_t r = ::recv(fd, data + got, n - got, 0);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw sys_error("recv failed");
    }
    if (r == 0) {
      if (got == 0) return false;
      throw Error(ErrorKind::kTransport, "connection closed mid-frame");
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

uint32_t read_u32(const char* p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

void put_u32(char* p, uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

}  // namespace

HostAddress parse_host_address(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(ErrorKind::kConfig, "expected host:port, got '" + text + "'");
  }
  HostAddress a;
  a.host = text.substr(0, colon);
  if (a.host.size() >= 2 && a.host.front() == '[' && a.host.back() == ']') {
    a.host = a.host.substr(1, a.host.size() - 2);
  }
  try {
    unsigned long port = std::stoul(text.substr(colon + 1));
    if (port > 65535) throw std::out_of_range("port");
    a.port = static_cast<uint16_t>(port);
  } catch (const std::exception&) {
    throw Error(ErrorKind::kConfig, "bad port in '" + text + "'");
  }
  return a;
}

std::vector<HostAddress> read_hosts_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read hosts file " + path.string());
  std::vector<HostAddress> hosts;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    hosts.push_back(parse_host_address(line.substr(b, e - b + 1)));
  }
  if (hosts.empty()) throw Error(ErrorKind::kConfig, "hosts file " + path.string() + " is empty");
  return hosts;
}

std::vector<uint32_t> places_of_rank(uint32_t rank, uint32_t ranks, uint32_t place_count) {
  std::vector<uint32_t> out;
  for (uint32_t p = 0; p < place_count; ++p) {
    if (rank_of_place(p, ranks) == rank) out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------

TcpTransport::TcpTransport(uint32_t place_count, std::vector<HostAddress> hosts, uint32_t rank)
    : Transport(place_count), hosts_(std::move(hosts)), rank_(rank) {
  if (hosts_.empty()) throw Error(ErrorKind::kConfig, "TCP transport needs at least one host");
  if (rank_ >= hosts_.size()) {
    throw Error(ErrorKind::kConfig, "rank " + std::to_string(rank_) + " has no host entry");
  }
  const auto ranks = static_cast<uint32_t>(hosts_.size());
  local_ = places_of_rank(rank_, ranks, place_count);
  out_fds_.assign(place_count, std::vector<int>(place_count, -1));

  AddrInfo ai;
  resolve(hosts_[rank_], true, ai);
  for (addrinfo* a = ai.head; a != nullptr; a = a->ai_next) {
    int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd, 256) == 0) {
      listen_fd_ = fd;
      break;
    }
    ::close(fd);
  }
  if (listen_fd_ < 0) throw sys_error("cannot listen on " + hosts_[rank_].to_string());

  sockaddr_storage bound{};
  socklen_t len = sizeof bound;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  bound_port_ = ntohs(bound.ss_family == AF_INET6
                          ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                          : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
  if (hosts_[rank_].port == 0) hosts_[rank_].port = bound_port_;

  std::size_t expected = local_.size() * (place_count - 1);
  acceptor_ = std::thread([this, expected] { accept_loop(expected); });
}

TcpTransport::~TcpTransport() {
  if (!closed_) {
    closing_ = true;
    shutdown_all();
  }
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lock(readers_mu_);
    for (auto& t : readers_) {
      if (t.joinable()) t.join();
    }
  }
  for (auto& row : out_fds_) {
    for (int fd : row) {
      if (fd >= 0) ::close(fd);
    }
  }
  for (int fd : in_fds_) ::close(fd);
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpTransport::shutdown_all() noexcept {
  if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
  for (auto& row : out_fds_) {
    for (int fd : row) {
      if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
    }
  }
  std::lock_guard lock(readers_mu_);
  for (int fd : in_fds_) ::shutdown(fd, SHUT_RDWR);
}

void TcpTransport::accept_loop(std::size_t expected) {
  for (std::size_t i = 0; i < expected; ++i) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) {
        --i;
        continue;
      }
      return;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(readers_mu_);
    if (closing_) {
      ::close(fd);
      return;
    }
    in_fds_.push_back(fd);
    readers_.emplace_back([this, fd] { read_loop(fd); });
  }
}

void TcpTransport::read_loop(int fd) {
  char hs[8];
  uint32_t origin = 0;
  uint32_t dest = 0;
  try {
    if (!read_all(fd, hs, sizeof hs)) return;
    origin = read_u32(hs);
    dest = read_u32(hs + 4);
    check_endpoints(origin, dest);
    if (rank_of_place(dest, static_cast<uint32_t>(hosts_.size())) != rank_) {
      throw Error(ErrorKind::kProtocol, "connection for place not hosted here");
    }
  } catch (const std::exception&) {
    return;
  }
  try {
    std::string frame;
    char prefix[4];
    while (read_all(fd, prefix, sizeof prefix)) {
      frame.resize(read_u32(prefix));
      if (!frame.empty() && !read_all(fd, frame.data(), frame.size())) {
        throw Error(ErrorKind::kTransport, "connection closed mid-frame");
      }
      Frame decoded = decode_frame(frame);
      if (auto* t = std::get_if<TermGroupMsg>(&decoded)) {
        if (t->origin != origin || t->dest != dest) {
          throw Error(ErrorKind::kProtocol, "term frame on wrong connection");
        }
        deliver(std::move(*t));
      } else {
        auto& ids = std::get<IdGroupMsg>(decoded);
        if (ids.origin != origin || ids.dest != dest) {
          throw Error(ErrorKind::kProtocol, "id frame on wrong connection");
        }
        deliver(std::move(ids));
      }
    }
    origin_closed(origin, dest, "connection closed");
  } catch (const std::exception& e) {
    origin_closed(origin, dest, e.what());
  }
}

void TcpTransport::connect(std::chrono::milliseconds timeout) {
  const auto ranks = static_cast<uint32_t>(hosts_.size());
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (uint32_t origin : local_) {
    for (uint32_t dest = 0; dest < place_count(); ++dest) {
      if (dest == origin) continue;
      const HostAddress& addr = hosts_[rank_of_place(dest, ranks)];
      int fd = -1;
      while (fd < 0) {
        AddrInfo ai;
        resolve(addr, false, ai);
        for (addrinfo* a = ai.head; a != nullptr && fd < 0; a = a->ai_next) {
          int s = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
          if (s < 0) continue;
          if (::connect(s, a->ai_addr, a->ai_addrlen) == 0) {
            fd = s;
          } else {
            ::close(s);
          }
        }
        if (fd >= 0) break;
        if (std::chrono::steady_clock::now() > deadline) {
          throw sys_error("cannot connect to " + addr.to_string() + " for place " +
                          std::to_string(dest));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
      }
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      char hs[8];
      put_u32(hs, origin);
      put_u32(hs + 4, dest);
      out_fds_[origin][dest] = fd;
      write_all(fd, hs, sizeof hs);
    }
  }
}

void TcpTransport::send_frame(uint32_t origin, uint32_t dest, const std::string& frame) {
  check_endpoints(origin, dest);
  int fd = out_fds_[origin][dest];
  if (fd < 0) {
    throw Error(ErrorKind::kTransport, "no connection " + std::to_string(origin) + "->" +
                                           std::to_string(dest) + " from this process");
  }
  if (frame.size() > UINT32_MAX) throw Error(ErrorKind::kTransport, "frame exceeds 4 GiB");
  char prefix[4];
  put_u32(prefix, static_cast<uint32_t>(frame.size()));
  write_all(fd, prefix, sizeof prefix);
  write_all(fd, frame.data(), frame.size());
}

void TcpTransport::push_terms(TermGroupMsg msg) {
  if (msg.origin == msg.dest) {
    deliver(std::move(msg));
    return;
  }
  send_frame(msg.origin, msg.dest, encode_frame(msg));
}

void TcpTransport::pull_ids(IdGroupMsg msg) {
  if (msg.origin == msg.dest) {
    deliver(std::move(msg));
    return;
  }
  send_frame(msg.origin, msg.dest, encode_frame(msg));
}

void TcpTransport::close() {
  if (closed_) return;
  closed_ = true;
  for (auto& row : out_fds_) {
    for (int fd : row) {
      if (fd >= 0) ::shutdown(fd, SHUT_WR);
    }
  }
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> readers;
  {
    std::lock_guard lock(readers_mu_);
    readers.swap(readers_);
  }
  for (auto& t : readers) t.join();
}

}  // namespace tripress
