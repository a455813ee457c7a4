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

#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tripress/term.h"

namespace tripress {

// Unique terms one place sends to the place that owns them.
struct TermGroupMsg {
  uint32_t origin = 0;
  uint32_t dest = 0;
  uint64_t loop = 0;
  std::vector<Term> terms;

  friend bool operator==(const TermGroupMsg&, const TermGroupMsg&) = default;
};

// Ids for a TermGroupMsg, positionally aligned, sent back by the encoder.
struct IdGroupMsg {
  uint32_t origin = 0;  // the encoding place
  uint32_t dest = 0;    // the place that asked
  uint64_t loop = 0;
  std::vector<TermId> ids;

  friend bool operator==(const IdGroupMsg&, const IdGroupMsg&) = default;
};

// Frame layout, little-endian:
//   u8 kind (1 = terms, 2 = ids) | u32 origin | u32 dest | u64 loop | u64 count
//   terms: count x (u32 byte length, bytes)    ids: count x u64
enum class FrameKind : uint8_t { kTerms = 1, kIds = 2 };
inline constexpr std::size_t kFrameHeaderSize = 1 + 4 + 4 + 8 + 8;

std::size_t frame_size(const TermGroupMsg& msg) noexcept;
std::size_t frame_size(const IdGroupMsg& msg) noexcept;

std::string encode_frame(const TermGroupMsg& msg);
std::string encode_frame(const IdGroupMsg& msg);

using Frame = std::variant<TermGroupMsg, IdGroupMsg>;

// Throws kProtocol on truncated or malformed input.
Frame decode_frame(std::string_view bytes);

// Order-preserving delivery of term and id groups between places. Sends may
// come from any place activity concurrently; each destination drains its
// inbox one loop at a time.
class Transport {
 public:
  explicit Transport(uint32_t place_count);
  virtual ~Transport();

  Transport(const Transport&) = delete;
  Transport& operator=(const Transport&) = delete;

  uint32_t place_count() const noexcept { return place_count_; }

  virtual void push_terms(TermGroupMsg msg) = 0;
  virtual void pull_ids(IdGroupMsg msg) = 0;

  // Blocks until every origin's group for (dest, loop) has arrived and
  // returns them ordered by origin 0..P-1.
  std::vector<TermGroupMsg> take_terms(uint32_t dest, uint64_t loop);
  std::vector<IdGroupMsg> take_ids(uint32_t dest, uint64_t loop);

  // Flushes and releases connections. Idempotent.
  virtual void close() {}

 protected:
  void deliver(TermGroupMsg msg);
  void deliver(IdGroupMsg msg);
  // Marks origin as gone for dest; waiters needing it fail instead of hanging.
  void origin_closed(uint32_t origin, uint32_t dest, const std::string& why);
  void check_endpoints(uint32_t origin, uint32_t dest) const;

 private:
  template <typename Msg>
  struct Slots {
    std::vector<std::optional<Msg>> by_origin;
    uint32_t filled = 0;
  };

  struct Mailbox {
    std::mutex mu;
    std::condition_variable cv;
    std::map<uint64_t, Slots<TermGroupMsg>> terms;
    std::map<uint64_t, Slots<IdGroupMsg>> ids;
    std::map<uint32_t, std::string> closed;  // origin -> reason
  };

  template <typename Msg>
  void deliver_into(std::map<uint64_t, Slots<Msg>> Mailbox::*slots, Msg msg);
  template <typename Msg>
  std::vector<Msg> take_from(std::map<uint64_t, Slots<Msg>> Mailbox::*slots, uint32_t dest,
                             uint64_t loop);

  uint32_t place_count_;
  std::vector<std::unique_ptr<Mailbox>> boxes_;
};

// All places live in this process; messages are moved, never serialized.
class InProcessTransport final : public Transport {
 public:
  explicit InProcessTransport(uint32_t place_count) : Transport(place_count) {}

  void push_terms(TermGroupMsg msg) override;
  void pull_ids(IdGroupMsg msg) override;
};

}  // namespace tripress
