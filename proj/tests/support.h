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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unistd.h>
#include <vector>

namespace tripress::testing {

namespace fs = std::filesystem;

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("tripress-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reference FNV-1a written independently of the library: the 64-bit prime
// 2^40 + 2^8 + 0xb3 is applied as a sum of shifts.
inline uint64_t fnv1a_oracle(std::string_view bytes) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h += (h << 1) + (h << 4) + (h << 5) + (h << 7) + (h << 8) + (h << 40);
  }
  return h;
}

// Statement lines of an N-Triples/N-Quads text, blanks and comments dropped.
inline std::vector<std::string> statement_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t i = line.find_first_not_of(" \t");
    if (i == std::string::npos || line[i] == '#') continue;
    out.push_back(line);
  }
  return out;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// Random small dataset with mixed arities, literals and blank nodes, already
// in canonical form (one space between terms, " ." terminator).
inline std::string random_dataset(std::mt19937_64& rng, std::size_t statements,
                                  std::size_t vocabulary, bool mixed = true) {
  std::uniform_int_distribution<std::size_t> pick(0, vocabulary - 1);
  std::uniform_int_distribution<int> kind(0, 9);
  auto term = [&](bool object) {
    std::size_t k = pick(rng);
    int v = kind(rng);
    if (object && v < 2) return "\"lit " + std::to_string(k) + "\"";
    if (object && v == 2) return "\"" + std::to_string(k) + "\"^^<http://www.w3.org/2001/XMLSchema#int>";
    if (object && v == 3) return "\"t\\u00e9" + std::to_string(k) + "\"@fr";
    if (v == 4) return "_:b" + std::to_string(k);
    return "<http://example.org/x/" + std::to_string(k) + ">";
  };
  std::string out;
  for (std::size_t i = 0; i < statements; ++i) {
    out += term(false) + " <http://example.org/p/" + std::to_string(pick(rng) % 16) + "> " +
           term(true);
    if (mixed && kind(rng) < 4) out += " <http://example.org/g/" + std::to_string(pick(rng) % 8) + ">";
    out += " .\n";
  }
  return out;
}

}  // namespace tripress::testing
