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
#include <filesystem>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tripress/term.h"

namespace tripress {

// Single-dictionary reference encoder: ids 1, 2, 3, ... in order of first
// occurrence.
struct SequentialEncoding {
  std::unordered_map<Term, uint64_t> dict;
  std::vector<uint64_t> ids;      // flattened, statement order
  std::vector<uint8_t> arities;   // one per statement

  void add(const Statement& stmt);
};

SequentialEncoding sequential_encode(std::span<const Statement> statements);

// Writes a sequential encoding as a single-place run (dict-0.tsv,
// data-0.bin, MANIFEST) that decode() and verify accept.
void write_sequential_run(const SequentialEncoding& enc, const std::filesystem::path& dir);

// True when positions i, j hold equal ids in `a` exactly when they do in `b`.
bool same_equality_classes(std::span<const uint64_t> a, std::span<const uint64_t> b);

// Decodes a committed run. `sink` receives each place's statements in file
// order as serialized N-Triples/N-Quads lines. Throws kCorrupt for unknown
// ids, naming the file and byte offset.
void decode_run(const std::filesystem::path& dir,
                const std::function<void(uint32_t place, std::string_view line)>& sink);

// Per-place decoded text, index = place.
std::vector<std::string> decode(const std::filesystem::path& dir);
void decode_to_stream(const std::filesystem::path& dir, std::ostream& out);

enum class ViolationKind { kFunctional, kInjective, kResidue, kMalformed, kUnresolved };
const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct ConsistencyReport {
  uint32_t place_count = 0;
  uint64_t entries = 0;
  uint64_t checked_ids = 0;  // data ids checked for resolution
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
  std::string summary() const;
};

// Pools dictionary files (file i belongs to place places[i]) and checks
// term->id functionality, id->term injectivity and the residue law
// id % P == file place == partition_hash(term) % P. Never throws on bad
// content; every problem becomes a violation.
ConsistencyReport check_consistency(std::span<const std::filesystem::path> dict_files,
                                    std::span<const uint32_t> places, uint32_t place_count);

// check_consistency over a committed run directory, plus a check that every
// id in the data files resolves.
ConsistencyReport verify_run(const std::filesystem::path& dir);

}  // namespace tripress
