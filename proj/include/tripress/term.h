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

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace tripress {

// A term is the canonical lexical token produced by the parser: IRIs without
// their angle brackets, literals with quotes/language tag/datatype verbatim,
// blank nodes as `_:label`. Identity is exact byte equality.
using Term = std::string;
using TermView = std::string_view;

// 64-bit term identifier. The owning place is recoverable as value % places;
// values below the place count are never assigned and 0 is the nil sentinel.
struct TermId {
  uint64_t value = 0;

  constexpr bool is_nil() const noexcept { return value == 0; }
  constexpr uint32_t owner(uint32_t place_count) const noexcept {
    return static_cast<uint32_t>(value % place_count);
  }
  friend constexpr auto operator<=>(TermId, TermId) = default;
};

inline constexpr TermId kNilId{0};

inline constexpr std::size_t kMaxArity = 4;

// A triple (arity 3) or quad (arity 4).
class Statement {
 public:
  Statement() = default;
  Statement(Term s, Term p, Term o);
  Statement(Term s, Term p, Term o, Term g);

  uint8_t arity() const noexcept { return arity_; }
  std::span<const Term> terms() const noexcept { return {terms_.data(), arity_}; }
  const Term& operator[](std::size_t i) const { return terms_[i]; }

  friend bool operator==(const Statement& a, const Statement& b) {
    return a.terms().size() == b.terms().size() &&
           std::equal(a.terms().begin(), a.terms().end(), b.terms().begin());
  }

 private:
  std::array<Term, kMaxArity> terms_;
  uint8_t arity_ = 0;
};

struct EncodedStatement {
  std::array<TermId, kMaxArity> ids{};
  uint8_t arity = 0;

  std::span<const TermId> view() const noexcept { return {ids.data(), arity}; }
  friend bool operator==(const EncodedStatement& a, const EncodedStatement& b) {
    return a.arity == b.arity &&
           std::equal(a.view().begin(), a.view().end(), b.view().begin());
  }
};

// 64-bit FNV-1a over the term bytes. Normative: dictionaries written with a
// given place count are only valid for readers using the same function.
constexpr uint64_t partition_hash(TermView term) noexcept {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : term) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Index of the place owning `term`. Throws kConfig when place_count is 0.
uint32_t destination(TermView term, uint32_t place_count);

// Same as destination() without the argument check, for hot loops.
inline uint32_t destination_unchecked(TermView term, uint32_t place_count) noexcept {
  return static_cast<uint32_t>(partition_hash(term) % place_count);
}

enum class TermKind { kIri, kLiteral, kBlank };

TermKind kind_of(TermView term) noexcept;

// Writes the N-Triples form of a term (IRIs regain their angle brackets).
void append_serialized(std::string& out, TermView term);

// One statement as an N-Triples/N-Quads line including the trailing newline.
std::string serialize_statement(const Statement& stmt);

}  // namespace tripress
