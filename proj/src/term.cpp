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

#include "tripress/term.h"

#include <utility>

#include "tripress/error.h"

namespace tripress {

Statement::Statement(Term s, Term p, Term o)
    : terms_{std::move(s), std::move(p), std::move(o), Term{}}, arity_(3) {}

Statement::Statement(Term s, Term p, Term o, Term g)
    : terms_{std::move(s), std::move(p), std::move(o), std::move(g)}, arity_(4) {}

uint32_t destination(TermView term, uint32_t place_count) {
  if (place_count == 0) {
    throw Error(ErrorKind::kConfig, "place count must be at least 1");
  }
  return destination_unchecked(term, place_count);
}

TermKind kind_of(TermView term) noexcept {
  if (!term.empty() && term.front() == '"') return TermKind::kLiteral;
  if (term.starts_with("_:")) return TermKind::kBlank;
  return TermKind::kIri;
}

void append_serialized(std::string& out, TermView term) {
  if (kind_of(term) == TermKind::kIri) {
    out.push_back('<');
    out.append(term);
    out.push_back('>');
  } else {
    out.append(term);
  }
}

std::string serialize_statement(const Statement& stmt) {
  std::string line;
  for (const Term& t : stmt.terms()) {
    append_serialized(line, t);
    line.push_back(' ');
  }
  line.append(".\n");
  return line;
}

}  // namespace tripress
