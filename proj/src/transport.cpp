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

#include "tripress/transport.h"

#include <cstring>

#include "tripress/error.h"

namespace tripress {
namespace {

template <typename T>
void put_le(std::string& out, T v) {
  char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<char>((static_cast<uint64_t>(v) >> (8 * i)) & 0xff);
  }
  out.append(buf, sizeof(T));
}

class Cursor {
 public:
  explicit Cursor(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorKind::kProtocol, "truncated frame");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void put_header(std::string& out, FrameKind kind, uint32_t origin, uint32_t dest,
                uint64_t loop, uint64_t count) {
  out.push_back(static_cast<char>(kind));
  put_le<uint32_t>(out, origin);
  put_le<uint32_t>(out, dest);
  put_le<uint64_t>(out, loop);
  put_le<uint64_t>(out, count);
}

}  // namespace

std::size_t frame_size(const TermGroupMsg& msg) noexcept {
  std::size_t n = kFrameHeaderSize;
  for (const auto& t : msg.terms) n += 4 + t.size();
  return n;
}

std::size_t frame_size(const IdGroupMsg& msg) noexcept {
  return kFrameHeaderSize + 8 * msg.ids.size();
}

std::string encode_frame(const TermGroupMsg& msg) {
  std::string out;
  out.reserve(frame_size(msg));
  put_header(out, FrameKind::kTerms, msg.origin, msg.dest, msg.loop, msg.terms.size());
  for (const auto& t : msg.terms) {
    put_le<uint32_t>(out, static_cast<uint32_t>(t.size()));
    out.append(t);
  }
  return out;
}

std::string encode_frame(const IdGroupMsg& msg) {
  std::string out;
  out.reserve(frame_size(msg));
  put_header(out, FrameKind::kIds, msg.origin, msg.dest, msg.loop, msg.ids.size());
  for (TermId id : msg.ids) put_le<uint64_t>(out, id.value);
  return out;
}

Frame decode_frame(std::string_view bytes) {
  Cursor in(bytes);
  auto kind = in.get<uint8_t>();
  auto origin = in.get<uint32_t>();
  auto dest = in.get<uint32_t>();
  auto loop = in.get<uint64_t>();
  auto count = in.get<uint64_t>();
  if (kind == static_cast<uint8_t>(FrameKind::kTerms)) {
    TermGroupMsg msg{origin, dest, loop, {}};
    // Every term needs at least its 4-byte length prefix.
    if (count > in.remaining() / 4) throw Error(ErrorKind::kProtocol, "term count too large");
    msg.terms.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
      auto len = in.get<uint32_t>();
      msg.terms.emplace_back(in.take(len));
    }
    if (in.remaining() != 0) throw Error(ErrorKind::kProtocol, "trailing bytes in frame");
    return msg;
  }
  if (kind == static_cast<uint8_t>(FrameKind::kIds)) {
    IdGroupMsg msg{origin, dest, loop, {}};
    if (count != in.remaining() / 8 || in.remaining() % 8 != 0) {
      throw Error(ErrorKind::kProtocol, "id frame length mismatch");
    }
    msg.ids.reserve(count);
    for (uint64_t i = 0; i < count; ++i) msg.ids.push_back(TermId{in.get<uint64_t>()});
    return msg;
  }
  throw Error(ErrorKind::kProtocol, "unknown frame kind " + std::to_string(kind));
}

// ---------------------------------------------------------------------------

Transport::Transport(uint32_t place_count) : place_count_(place_count) {
  if (place_count == 0) throw Error(ErrorKind::kConfig, "place count must be at least 1");
  boxes_.reserve(place_count);
  for (uint32_t p = 0; p < place_count; ++p) boxes_.push_back(std::make_unique<Mailbox>());
}

Transport::~Transport() = default;

void Transport::check_endpoints(uint32_t origin, uint32_t dest) const {
  if (origin >= place_count_ || dest >= place_count_) {
    throw Error(ErrorKind::kProtocol, "message endpoint out of range: " +
                                          std::to_string(origin) + "->" + std::to_string(dest));
  }
}

template <typename Msg>
void Transport::deliver_into(std::map<uint64_t, Slots<Msg>> Mailbox::*slots, Msg msg) {
  check_endpoints(msg.origin, msg.dest);
  Mailbox& box = *boxes_[msg.dest];
  {
    std::lock_guard lock(box.mu);
    auto& s = (box.*slots)[msg.loop];
    if (s.by_origin.empty()) s.by_origin.resize(place_count_);
    auto& slot = s.by_origin[msg.origin];
    if (slot) {
      throw Error(ErrorKind::kProtocol, "duplicate group from place " +
                                            std::to_string(msg.origin) + " in loop " +
                                            std::to_string(msg.loop));
    }
    slot = std::move(msg);
    ++s.filled;
  }
  box.cv.notify_all();
}

template <typename Msg>
std::vector<Msg> Transport::take_from(std::map<uint64_t, Slots<Msg>> Mailbox::*slots,
                                      uint32_t dest, uint64_t loop) {
  Mailbox& box = *boxes_[dest];
  std::unique_lock lock(box.mu);
  auto& all = box.*slots;
  while (true) {
    auto it = all.find(loop);
    if (it != all.end() && it->second.filled == place_count_) break;
    for (const auto& [origin, why] : box.closed) {
      if (it == all.end() || !it->second.by_origin[origin]) {
        throw Error(ErrorKind::kTransport, "place " + std::to_string(origin) +
                                               " went away before delivering to place " +
                                               std::to_string(dest) + ": " + why);
      }
    }
    box.cv.wait(lock);
  }
  auto node = all.extract(loop);
  std::vector<Msg> out;
  out.reserve(place_count_);
  for (auto& m : node.mapped().by_origin) out.push_back(std::move(*m));
  return out;
}

void Transport::deliver(TermGroupMsg msg) { deliver_into(&Mailbox::terms, std::move(msg)); }
void Transport::deliver(IdGroupMsg msg) { deliver_into(&Mailbox::ids, std::move(msg)); }

std::vector<TermGroupMsg> Transport::take_terms(uint32_t dest, uint64_t loop) {
  return take_from(&Mailbox::terms, dest, loop);
}

std::vector<IdGroupMsg> Transport::take_ids(uint32_t dest, uint64_t loop) {
  return take_from(&Mailbox::ids, dest, loop);
}

void Transport::origin_closed(uint32_t origin, uint32_t dest, const std::string& why) {
  Mailbox& box = *boxes_[dest];
  {
    std::lock_guard lock(box.mu);
    box.closed.emplace(origin, why);
  }
  box.cv.notify_all();
}

void InProcessTransport::push_terms(TermGroupMsg msg) { deliver(std::move(msg)); }
void InProcessTransport::pull_ids(IdGroupMsg msg) { deliver(std::move(msg)); }

}  // namespace tripress
