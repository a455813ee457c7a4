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
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

namespace tripress {

// Zipf(s) over ranks 0..n-1 by inverse CDF; s = 0 is uniform.
class ZipfSampler {
 public:
  ZipfSampler(uint64_t n, double exponent);

  uint64_t operator()(std::mt19937_64& rng) const;
  // Probability of rank k.
  double probability(uint64_t k) const;
  uint64_t size() const noexcept { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

struct GeneratorParams {
  uint64_t statements = 1000;
  uint64_t distinct_terms = 1000;  // U: size of the term universe
  double zipf = 1.0;
  uint64_t seed = 42;
  uint8_t arity = 3;               // 3, 4, or 0 for a random mix
  std::size_t mean_term_len = 40;  // mean IRI length without brackets
};

// Exact byte counts of a generated file; stored next to it as <file>.stats.json.
struct GeneratedStats {
  GeneratorParams params;
  uint64_t plain_bytes = 0;
  uint64_t statements = 0;
  uint64_t triples = 0;
  uint64_t quads = 0;
  uint64_t term_slots = 0;
  uint64_t distinct_terms = 0;       // terms that actually occur
  uint64_t distinct_term_bytes = 0;  // summed lexical lengths of those terms
  uint64_t top_subject_count = 0;    // occurrences of the most frequent subject
};

void to_json(nlohmann::json& j, const GeneratedStats& s);
void from_json(const nlohmann::json& j, GeneratedStats& s);

// Lexical form of the synthetic IRI with the given rank.
std::string synthetic_term(uint64_t rank, std::size_t mean_len);

// Writes the dataset (gzip when the path ends in .gz) and its sidecar.
// Deterministic for fixed params.
GeneratedStats generate(const GeneratorParams& params, const std::filesystem::path& path);

std::filesystem::path stats_path_for(const std::filesystem::path& dataset);
GeneratedStats read_stats(const std::filesystem::path& sidecar);

// Compression ratio a fresh run with `place_count` places should achieve,
// assuming ids fill the range [P, P + distinct) evenly.
double predicted_compression_ratio(const GeneratedStats& stats, uint32_t place_count);

}  // namespace tripress
