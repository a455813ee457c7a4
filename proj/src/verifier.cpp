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

#include "tripress/verifier.h"

#include <charconv>
#include <sstream>
#include <unordered_set>

#include "tripress/error.h"
#include "tripress/parser.h"
#include "tripress/storage.h"

namespace tripress {

namespace fs = std::filesystem;

void SequentialEncoding::add(const Statement& stmt) {
  for (const Term& t : stmt.terms()) {
    auto [it, inserted] = dict.try_emplace(t, dict.size() + 1);
    ids.push_back(it->second);
  }
  arities.push_back(stmt.arity());
}

SequentialEncoding sequential_encode(std::span<const Statement> statements) {
  SequentialEncoding enc;
  for (const auto& s : statements) enc.add(s);
  return enc;
}

void write_sequential_run(const SequentialEncoding& enc, const fs::path& dir) {
  fs::create_directories(dir);
  invalidate_run(dir);
  std::vector<const Term*> by_id(enc.dict.size());
  for (const auto& [term, id] : enc.dict) by_id[id - 1] = &term;
  DictionaryWriter dict(dir / dict_file_name(0), false);
  for (std::size_t i = 0; i < by_id.size(); ++i) dict.append_mapping(TermId{i + 1}, *by_id[i]);
  dict.close();
  EncodedWriter data(dir, 0, 1, false);
  std::size_t pos = 0;
  for (uint8_t arity : enc.arities) {
    EncodedStatement s;
    s.arity = arity;
    for (uint8_t k = 0; k < arity; ++k) s.ids[k] = TermId{enc.ids[pos++]};
    data.write_encoded(s);
  }
  data.close();
  Manifest m;
  m.place_count = 1;
  m.files = {dict_file_name(0), data_file_name(0)};
  if (data.mixed()) m.files.push_back(arity_file_name(0));
  m.write(dir);
}

bool same_equality_classes(std::span<const uint64_t> a, std::span<const uint64_t> b) {
  if (a.size() != b.size()) return false;
  std::unordered_map<uint64_t, uint64_t> ab;
  std::unordered_map<uint64_t, uint64_t> ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [it1, new1] = ab.try_emplace(a[i], b[i]);
    if (!new1 && it1->second != b[i]) return false;
    auto [it2, new2] = ba.try_emplace(b[i], a[i]);
    if (!new2 && it2->second != a[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

fs::path require_output(const fs::path& dir, const std::string& name) {
  auto p = find_output(dir, name);
  if (!p) throw Error(ErrorKind::kCorrupt, dir.string() + ": missing " + name);
  return *p;
}

}  // namespace

void decode_run(const fs::path& dir,
                const std::function<void(uint32_t, std::string_view)>& sink) {
  const uint32_t places = read_run_place_count(dir);
  std::unordered_map<uint64_t, Term> pooled;
  for (uint32_t p = 0; p < places; ++p) {
    auto loaded = load_dictionary(require_output(dir, dict_file_name(p)), p, places);
    for (auto& [id, term] : loaded.entries) pooled.emplace(id.value, std::move(term));
  }
  std::string line;
  for (uint32_t p = 0; p < places; ++p) {
    fs::path path = require_output(dir, data_file_name(p));
    EncodedData data = load_encoded(path);
    if (data.header.place_count != places || data.header.place_index != p) {
      throw Error(ErrorKind::kCorrupt, path.string() + ": header names a different place");
    }
    std::size_t pos = 0;
    for (uint8_t arity : data.arities) {
      line.clear();
      for (uint8_t k = 0; k < arity; ++k, ++pos) {
        auto it = pooled.find(data.ids[pos]);
        if (it == pooled.end()) {
          throw Error(ErrorKind::kCorrupt,
                      path.string() + ": unknown id " + std::to_string(data.ids[pos]) +
                          " at byte offset " +
                          std::to_string(EncodedHeader::kSize + 8 * pos));
        }
        append_serialized(line, it->second);
        line.push_back(' ');
      }
      line.append(".\n");
      sink(p, line);
    }
  }
}

std::vector<std::string> decode(const fs::path& dir) {
  std::vector<std::string> out(read_run_place_count(dir));
  decode_run(dir, [&](uint32_t place, std::string_view line) { out[place].append(line); });
  return out;
}

void decode_to_stream(const fs::path& dir, std::ostream& out) {
  decode_run(dir, [&](uint32_t, std::string_view line) { out << line; });
}

// ---------------------------------------------------------------------------

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kFunctional: return "functional";
    case ViolationKind::kInjective: return "injective";
    case ViolationKind::kResidue: return "residue";
    case ViolationKind::kMalformed: return "malformed";
    case ViolationKind::kUnresolved: return "unresolved";
  }
  return "?";
}

std::size_t ConsistencyReport::count(ViolationKind kind) const {
  std::size_t n = 0;
  for (const auto& v : violations) n += v.kind == kind;
  return n;
}

std::string ConsistencyReport::summary() const {
  std::ostringstream s;
  s << "places " << place_count << ", dictionary entries " << entries << ", data ids "
    << checked_ids << ", violations " << violations.size();
  for (auto k : {ViolationKind::kFunctional, ViolationKind::kInjective, ViolationKind::kResidue,
                 ViolationKind::kMalformed, ViolationKind::kUnresolved}) {
    if (std::size_t n = count(k)) s << " [" << to_string(k) << " " << n << "]";
  }
  return s.str();
}

namespace {

class DictionaryPool {
 public:
  explicit DictionaryPool(uint32_t place_count, ConsistencyReport& report)
      : place_count_(place_count), report_(report) {}

  void add_file(const fs::path& path, uint32_t place) {
    std::string text;
    try {
      text = read_file(path);
    } catch (const std::exception& e) {
      violate(ViolationKind::kMalformed, e.what());
      return;
    }
    std::string_view rest(text);
    uint64_t line_no = 0;
    while (!rest.empty()) {
      ++line_no;
      std::size_t nl = rest.find('\n');
      std::string_view line = rest.substr(0, nl);
      rest.remove_prefix(nl == std::string_view::npos ? rest.size() : nl + 1);
      auto where = [&] { return path.filename().string() + ":" + std::to_string(line_no); };
      std::size_t tab = line.find('\t');
      uint64_t id = 0;
      if (tab == std::string_view::npos || tab + 1 == line.size() ||
          std::from_chars(line.data(), line.data() + tab, id).ptr != line.data() + tab) {
        violate(ViolationKind::kMalformed, where() + ": malformed record");
        continue;
      }
      std::string_view term = line.substr(tab + 1);
      ++report_.entries;
      if (id < place_count_ || id % place_count_ != place) {
        violate(ViolationKind::kResidue, where() + ": id " + std::to_string(id) +
                                             " not owned by place " + std::to_string(place));
      } else if (destination_unchecked(term, place_count_) != place) {
        violate(ViolationKind::kResidue, where() + ": term " + std::string(term) +
                                             " hashes to place " +
                                             std::to_string(destination_unchecked(term, place_count_)));
      }
      auto [t_it, t_new] = term_to_id_.try_emplace(Term(term), id);
      if (!t_new && t_it->second != id) {
        violate(ViolationKind::kFunctional, where() + ": term " + std::string(term) +
                                                " has ids " + std::to_string(t_it->second) +
                                                " and " + std::to_string(id));
      }
      auto [i_it, i_new] = id_to_term_.try_emplace(id, t_it->first);
      if (!i_new && i_it->second != term) {
        violate(ViolationKind::kInjective, where() + ": id " + std::to_string(id) +
                                               " names both " + std::string(i_it->second) +
                                               " and " + std::string(term));
      }
    }
  }

  bool resolves(uint64_t id) const { return id_to_term_.contains(id); }

  void violate(ViolationKind kind, std::string detail) {
    report_.violations.push_back({kind, std::move(detail)});
  }

 private:
  uint32_t place_count_;
  ConsistencyReport& report_;
  std::unordered_map<Term, uint64_t> term_to_id_;
  std::unordered_map<uint64_t, std::string_view> id_to_term_;  // views into term_to_id_ keys
};

}  // namespace

ConsistencyReport check_consistency(std::span<const fs::path> dict_files,
                                    std::span<const uint32_t> places, uint32_t place_count) {
  if (dict_files.size() != places.size()) {
    throw Error(ErrorKind::kConfig, "one place index is needed per dictionary file");
  }
  if (place_count == 0) throw Error(ErrorKind::kConfig, "place count must be at least 1");
  ConsistencyReport report;
  report.place_count = place_count;
  DictionaryPool pool(place_count, report);
  for (std::size_t i = 0; i < dict_files.size(); ++i) pool.add_file(dict_files[i], places[i]);
  return report;
}

ConsistencyReport verify_run(const fs::path& dir) {
  const uint32_t places = read_run_place_count(dir);
  ConsistencyReport report;
  report.place_count = places;
  DictionaryPool pool(places, report);
  for (uint32_t p = 0; p < places; ++p) {
    auto path = find_output(dir, dict_file_name(p));
    if (!path) {
      pool.violate(ViolationKind::kMalformed, "missing " + dict_file_name(p));
      continue;
    }
    pool.add_file(*path, p);
  }
  for (uint32_t p = 0; p < places; ++p) {
    auto path = find_output(dir, data_file_name(p));
    if (!path) {
      pool.violate(ViolationKind::kMalformed, "missing " + data_file_name(p));
      continue;
    }
    EncodedData data;
    try {
      data = load_encoded(*path);
    } catch (const std::exception& e) {
      pool.violate(ViolationKind::kMalformed, e.what());
      continue;
    }
    for (std::size_t i = 0; i < data.ids.size(); ++i) {
      ++report.checked_ids;
      if (!pool.resolves(data.ids[i])) {
        pool.violate(ViolationKind::kUnresolved,
                     path->filename().string() + ": unknown id " + std::to_string(data.ids[i]) +
                         " at byte offset " + std::to_string(EncodedHeader::kSize + 8 * i));
      }
    }
  }
  return report;
}

}  // namespace tripress
