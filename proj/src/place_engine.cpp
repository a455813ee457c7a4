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

#include "tripress/place_engine.h"

#include <limits>

#include "tripress/error.h"

namespace tripress {

PlaceState::PlaceState(uint32_t place_index, uint32_t place_count)
    : place_index(place_index),
      place_count(place_count),
      outgoing_groups(place_count),
      pulled_ids(place_count),
      pulled(place_count, false) {
  if (place_count == 0) throw Error(ErrorKind::kConfig, "place count must be at least 1");
  if (place_index >= place_count) {
    throw Error(ErrorKind::kConfig, "place index " + std::to_string(place_index) +
                                        " out of range for " + std::to_string(place_count) +
                                        " places");
  }
}

void PlaceState::begin_loop() {
  term_buffer.clear();
  arities.clear();
  // The map must go before the strings it views.
  dedup.clear();
  for (auto& g : outgoing_groups) g.clear();
  for (auto& ids : pulled_ids) ids.clear();
  std::fill(pulled.begin(), pulled.end(), false);
  merged = false;
}

std::vector<Term> PlaceState::buffered_terms() const {
  std::vector<Term> out;
  out.reserve(term_buffer.size());
  for (TermRef r : term_buffer) out.push_back(outgoing_groups[r.dest][r.index]);
  return out;
}

void reserve_loop(PlaceState& state, uint64_t statements) {
  const uint64_t slots = statements * 3;
  state.term_buffer.reserve(slots);
  state.arities.reserve(statements);
  state.dedup.reserve(slots);
}

void filter_statement(PlaceState& state, std::span<const std::string_view> terms) {
  for (std::string_view t : terms) {
    auto it = state.dedup.find(t);
    if (it == state.dedup.end()) {
      uint32_t dest = destination_unchecked(t, state.place_count);
      auto& group = state.outgoing_groups[dest];
      TermRef ref{dest, static_cast<uint32_t>(group.size())};
      const Term& stored = group.emplace_back(t);
      it = state.dedup.emplace(TermView(stored), ref).first;
    }
    state.term_buffer.push_back(it->second);
  }
  state.arities.push_back(static_cast<uint8_t>(terms.size()));
  state.metrics.parsed_terms += terms.size();
}

void filter_and_collect(PlaceState& state, const Chunk& chunk) {
  std::array<std::string_view, kMaxArity> views;
  for (const Statement& stmt : chunk.statements) {
    auto terms = stmt.terms();
    for (std::size_t i = 0; i < terms.size(); ++i) views[i] = terms[i];
    filter_statement(state, std::span<const std::string_view>(views.data(), terms.size()));
  }
}

uint64_t filter_raw_chunk(PlaceState& state, const RawChunk& chunk, bool skip_bad,
                          uint64_t& skipped) {
  std::array<std::string_view, kMaxArity> views;
  std::string why;
  uint64_t taken = 0;
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    uint8_t arity = parse_terms(chunk.line(i), views, why);
    if (arity == 0) {
      if (!skip_bad) throw ParseError(chunk.source, chunk.lines[i].number, why);
      ++skipped;
      continue;
    }
    filter_statement(state, std::span<const std::string_view>(views.data(), arity));
    ++taken;
  }
  return taken;
}

std::vector<TermGroupMsg> build_term_groups(PlaceState& state, uint64_t loop) {
  std::vector<TermGroupMsg> out;
  out.reserve(state.place_count);
  for (uint32_t d = 0; d < state.place_count; ++d) {
    const auto& group = state.outgoing_groups[d];
    if (d == state.place_index) {
      state.metrics.local_terms += group.size();
    } else {
      state.metrics.outgoing_terms += group.size();
    }
    out.push_back(TermGroupMsg{state.place_index, d, loop, {group.begin(), group.end()}});
  }
  return out;
}

TermId assign_id(PlaceState& state) {
  const uint64_t p = state.place_count;
  const uint64_t max_ordinal = (std::numeric_limits<uint64_t>::max() - state.place_index) / p;
  if (state.next_ordinal + 1 > max_ordinal) {
    throw Error(ErrorKind::kCapacity,
                "id space exhausted at place " + std::to_string(state.place_index));
  }
  ++state.next_ordinal;
  return TermId{state.next_ordinal * p + state.place_index};
}

IdGroupMsg encode_owned_terms(PlaceState& state, const TermGroupMsg& incoming) {
  IdGroupMsg reply{state.place_index, incoming.origin, incoming.loop, {}};
  reply.ids.reserve(incoming.terms.size());
  for (const Term& term : incoming.terms) {
    if (destination_unchecked(term, state.place_count) != state.place_index) {
      throw Error(ErrorKind::kProtocol, "place " + std::to_string(state.place_index) +
                                            " received term it does not own: " + term);
    }
    auto it = state.dict.find(TermView(term));
    if (it != state.dict.end()) {
      ++state.metrics.hits;
    } else {
      TermId id = assign_id(state);
      it = state.dict.emplace(term, id).first;
      state.journal.emplace_back(id, TermView(it->first));
      ++state.metrics.misses;
    }
    reply.ids.push_back(it->second);
  }
  state.metrics.processed_terms += incoming.terms.size();
  return reply;
}

void accept_ids(PlaceState& state, IdGroupMsg msg) {
  if (msg.dest != state.place_index || msg.origin >= state.place_count) {
    throw Error(ErrorKind::kProtocol, "id group misrouted to place " +
                                          std::to_string(state.place_index));
  }
  if (msg.ids.size() != state.outgoing_groups[msg.origin].size()) {
    throw Error(ErrorKind::kProtocol,
                "place " + std::to_string(msg.origin) + " returned " +
                    std::to_string(msg.ids.size()) + " ids for " +
                    std::to_string(state.outgoing_groups[msg.origin].size()) + " terms");
  }
  state.pulled_ids[msg.origin] = std::move(msg.ids);
  state.pulled[msg.origin] = true;
}

void merge_mappings(PlaceState& state) {
  for (uint32_t d = 0; d < state.place_count; ++d) {
    const auto& terms = state.outgoing_groups[d];
    const auto& ids = state.pulled_ids[d];
    if ((!state.pulled[d] && !terms.empty()) || terms.size() != ids.size()) {
      throw Error(ErrorKind::kProtocol, "ids from place " + std::to_string(d) +
                                            " missing or misaligned at place " +
                                            std::to_string(state.place_index));
    }
  }
  state.merged = true;
}

std::vector<EncodedStatement> compress_statements(PlaceState& state) {
  if (!state.merged && !state.term_buffer.empty()) {
    throw Error(ErrorKind::kConsistency, "compressing before ids were merged at place " +
                                             std::to_string(state.place_index));
  }
  std::vector<EncodedStatement> out;
  out.reserve(state.arities.size());
  std::size_t pos = 0;
  for (uint8_t arity : state.arities) {
    if (pos + arity > state.term_buffer.size()) {
      throw Error(ErrorKind::kConsistency, "term buffer shorter than recorded arities");
    }
    EncodedStatement enc;
    enc.arity = arity;
    for (uint8_t i = 0; i < arity; ++i, ++pos) {
      TermRef r = state.term_buffer[pos];
      enc.ids[i] = state.pulled_ids[r.dest][r.index];
    }
    out.push_back(enc);
  }
  if (pos != state.term_buffer.size()) {
    throw Error(ErrorKind::kConsistency, "term buffer longer than recorded arities");
  }
  state.metrics.statements += out.size();
  return out;
}

void seed_dictionary(PlaceState& state, std::vector<std::pair<TermId, Term>> entries) {
  uint64_t max_id = 0;
  state.dict.reserve(state.dict.size() + entries.size());
  for (auto& [id, term] : entries) {
    if (id.value < state.place_count || id.owner(state.place_count) != state.place_index) {
      throw Error(ErrorKind::kCorrupt, "id " + std::to_string(id.value) +
                                           " does not belong to place " +
                                           std::to_string(state.place_index));
    }
    max_id = std::max(max_id, id.value);
    if (!state.dict.emplace(std::move(term), id).second) {
      throw Error(ErrorKind::kCorrupt, "duplicate term in dictionary of place " +
                                           std::to_string(state.place_index));
    }
  }
  if (max_id != 0) {
    state.next_ordinal =
        std::max(state.next_ordinal, (max_id - state.place_index) / state.place_count);
  }
}

}  // namespace tripress
