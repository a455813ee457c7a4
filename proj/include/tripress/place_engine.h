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

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tripress/metrics.h"
#include "tripress/parser.h"
#include "tripress/term.h"
#include "tripress/transport.h"

namespace tripress {

struct TermHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

// term -> id map supporting lookups by string_view.
using TermDictionary = std::unordered_map<Term, TermId, TermHash, std::equal_to<>>;

// Everything one place owns. Only the place's own activity touches it.
//
// Per-loop buffers (term_buffer, outgoing_groups, dedup, pulled_ids) are
// cleared by begin_loop() and keep their capacity; `dict`, `next_ordinal` and
// `metrics` live for the whole run.
// Position of a unique term inside the outgoing groups: group `dest`, slot
// `index`. The id pulled back for it sits at the same slot of pulled_ids.
struct TermRef {
  uint32_t dest = 0;
  uint32_t index = 0;
};

struct PlaceState {
  PlaceState(uint32_t place_index, uint32_t place_count);

  uint32_t place_index;
  uint32_t place_count;

  TermDictionary dict;     // authoritative map for the terms this place owns
  uint64_t next_ordinal = 0;

  // Every parsed term in statement order, as a slot of outgoing_groups.
  std::vector<TermRef> term_buffer;
  std::vector<uint8_t> arities;

  // Unique terms per destination place. deque keeps views stable.
  std::vector<std::deque<Term>> outgoing_groups;
  std::unordered_map<TermView, TermRef> dedup;
  std::vector<std::vector<TermId>> pulled_ids;
  std::vector<bool> pulled;
  bool merged = false;

  // New mappings created since the last drain, in creation order.
  std::vector<std::pair<TermId, TermView>> journal;

  MetricCounters metrics;

  void begin_loop();
  std::vector<Term> buffered_terms() const;
};

// Sizes the per-loop buffers for about `statements` incoming statements so a
// large loop does not rehash its way up from empty.
void reserve_loop(PlaceState& state, uint64_t statements);

// Appends each statement's terms to term_buffer and each term, once per loop,
// to the outgoing group of its owner.
void filter_and_collect(PlaceState& state, const Chunk& chunk);
void filter_statement(PlaceState& state, std::span<const std::string_view> terms);

// Parses and filters an unparsed chunk in one pass. Returns the number of
// statements taken; malformed lines throw unless skip_bad, which counts them
// in `skipped`.
uint64_t filter_raw_chunk(PlaceState& state, const RawChunk& chunk, bool skip_bad,
                          uint64_t& skipped);

// Outgoing groups as messages for loop `loop`, one per destination (empty
// groups included). Counts outgoing/local terms.
std::vector<TermGroupMsg> build_term_groups(PlaceState& state, uint64_t loop);

// Next id of this place: (ordinal + 1) * P + place. Throws kCapacity when the
// 64-bit space is exhausted.
TermId assign_id(PlaceState& state);

// Looks up or creates an id for every incoming term, positionally aligned.
// Throws kProtocol for a term this place does not own.
IdGroupMsg encode_owned_terms(PlaceState& state, const TermGroupMsg& incoming);

// Stores ids pulled back from their encoder. Throws kProtocol on misalignment.
void accept_ids(PlaceState& state, IdGroupMsg msg);

// Checks that every outgoing group has its ids pulled back, positionally
// aligned. Throws kProtocol otherwise.
void merge_mappings(PlaceState& state);

// Replays term_buffer through the pulled ids, one statement per recorded
// arity. Requires merge_mappings() first.
std::vector<EncodedStatement> compress_statements(PlaceState& state);

// Seeds the dictionary from persisted entries and continues numbering after
// the largest owned id. Throws kCorrupt on residue or duplicate violations.
void seed_dictionary(PlaceState& state, std::vector<std::pair<TermId, Term>> entries);

}  // namespace tripress
