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

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "tripress/transport.h"

namespace tripress {

struct HostAddress {
  std::string host;
  uint16_t port = 0;

  std::string to_string() const { return host + ":" + std::to_string(port); }
};

// "host:port" per non-empty line; `#` starts a comment.
std::vector<HostAddress> read_hosts_file(const std::filesystem::path& path);
HostAddress parse_host_address(const std::string& text);

// Places are striped over processes: place p lives on rank p % ranks.
inline uint32_t rank_of_place(uint32_t place, uint32_t ranks) { return place % ranks; }
std::vector<uint32_t> places_of_rank(uint32_t rank, uint32_t ranks, uint32_t place_count);

// TCP backend. Every ordered pair of distinct places gets one long-lived
// connection from the origin's process to the destination's process; each
// frame is preceded by a u32 little-endian length. A place sending to itself
// short-circuits without serialization.
class TcpTransport final : public Transport {
 public:
  // Binds this rank's listener. A port of 0 picks an ephemeral port, which
  // only makes sense for a single-rank run.
  TcpTransport(uint32_t place_count, std::vector<HostAddress> hosts, uint32_t rank);
  ~TcpTransport() override;

  // Opens all outgoing connections of this rank's places, retrying until
  // peers are listening or `timeout` passes.
  void connect(std::chrono::milliseconds timeout = std::chrono::seconds(30));

  uint16_t bound_port() const noexcept { return bound_port_; }
  const std::vector<uint32_t>& local_places() const noexcept { return local_; }

  void push_terms(TermGroupMsg msg) override;
  void pull_ids(IdGroupMsg msg) override;

  // Half-closes outgoing connections and waits for every peer to do the same.
  void close() override;

 private:
  void send_frame(uint32_t origin, uint32_t dest, const std::string& frame);
  void accept_loop(std::size_t expected);
  void read_loop(int fd);
  void shutdown_all() noexcept;

  std::vector<HostAddress> hosts_;
  uint32_t rank_;
  std::vector<uint32_t> local_;
  int listen_fd_ = -1;
  uint16_t bound_port_ = 0;
  std::vector<std::vector<int>> out_fds_;  // [origin][dest], -1 if remote origin
  std::thread acceptor_;
  std::mutex readers_mu_;
  std::vector<std::thread> readers_;
  std::vector<int> in_fds_;
  std::atomic<bool> closing_{false};
  bool closed_ = false;
};

}  // namespace tripress
