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

#include "tripress/generator.h"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tripress/error.h"
#include "tripress/storage.h"

namespace tripress {

namespace fs = std::filesystem;

ZipfSampler::ZipfSampler(uint64_t n, double exponent) {
  if (n == 0) throw Error(ErrorKind::kConfig, "Zipf universe must be non-empty");
  if (exponent < 0) throw Error(ErrorKind::kConfig, "Zipf exponent must be non-negative");
  cdf_.resize(n);
  double sum = 0;
  for (uint64_t k = 0; k < n; ++k) {
    sum += 1.0 / std::pow(static_cast<double>(k + 1), exponent);
    cdf_[k] = sum;
  }
  for (auto& c : cdf_) c /= sum;
  cdf_.back() = 1.0;
}

uint64_t ZipfSampler::operator()(std::mt19937_64& rng) const {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<uint64_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                                        static_cast<std::ptrdiff_t>(cdf_.size() - 1)));
}

double ZipfSampler::probability(uint64_t k) const {
  return k == 0 ? cdf_[0] : cdf_[k] - cdf_[k - 1];
}

std::string synthetic_term(uint64_t rank, std::size_t mean_len) {
  std::string term = "http://example.org/r" + std::to_string(rank);
  // Lengths spread over mean_len - 4 .. mean_len + 4.
  std::size_t target = mean_len + (rank * 7919) % 9;
  target = target >= 4 ? target - 4 : 0;
  if (term.size() + 1 < target) {
    term.push_back('/');
    for (std::size_t i = 0; term.size() < target; ++i) {
      term.push_back(static_cast<char>('a' + (rank + i * 7) % 26));
    }
  }
  return term;
}

void to_json(nlohmann::json& j, const GeneratedStats& s) {
  j = nlohmann::json{{"params",
                      {{"statements", s.params.statements},
                       {"distinct_terms", s.params.distinct_terms},
                       {"zipf", s.params.zipf},
                       {"seed", s.params.seed},
                       {"arity", s.params.arity},
                       {"mean_term_len", s.params.mean_term_len}}},
                     {"plain_bytes", s.plain_bytes},
                     {"statements", s.statements},
                     {"triples", s.triples},
                     {"quads", s.quads},
                     {"term_slots", s.term_slots},
                     {"distinct_terms", s.distinct_terms},
                     {"distinct_term_bytes", s.distinct_term_bytes},
                     {"top_subject_count", s.top_subject_count}};
}

void from_json(const nlohmann::json& j, GeneratedStats& s) {
  const auto& p = j.at("params");
  p.at("statements").get_to(s.params.statements);
  p.at("distinct_terms").get_to(s.params.distinct_terms);
  p.at("zipf").get_to(s.params.zipf);
  p.at("seed").get_to(s.params.seed);
  p.at("arity").get_to(s.params.arity);
  p.at("mean_term_len").get_to(s.params.mean_term_len);
  j.at("plain_bytes").get_to(s.plain_bytes);
  j.at("statements").get_to(s.statements);
  j.at("triples").get_to(s.triples);
  j.at("quads").get_to(s.quads);
  j.at("term_slots").get_to(s.term_slots);
  j.at("distinct_terms").get_to(s.distinct_terms);
  j.at("distinct_term_bytes").get_to(s.distinct_term_bytes);
  j.at("top_subject_count").get_to(s.top_subject_count);
}

fs::path stats_path_for(const fs::path& dataset) {
  fs::path p = dataset;
  p += ".stats.json";
  return p;
}

GeneratedStats read_stats(const fs::path& sidecar) {
  std::ifstream in(sidecar);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + sidecar.string());
  return nlohmann::json::parse(in).get<GeneratedStats>();
}

namespace {

class DatasetSink {
 public:
  explicit DatasetSink(const fs::path& path) : path_(path) {
    if (path.extension() == ".gz") {
      gz_ = gzopen(path.c_str(), "wb6");
      if (gz_ == nullptr) throw Error(ErrorKind::kIo, "cannot create " + path.string());
    } else {
      out_.open(path, std::ios::binary | std::ios::trunc);
      if (!out_) throw Error(ErrorKind::kIo, "cannot create " + path.string());
    }
  }

  void write(const std::string& s) {
    buf_ += s;
    if (buf_.size() >= (1 << 20)) flush();
  }

  void close() {
    flush();
    if (gz_ != nullptr) {
      if (gzclose(gz_) != Z_OK) throw Error(ErrorKind::kIo, "gzip close failed on " + path_.string());
      gz_ = nullptr;
    } else {
      out_.close();
      if (!out_) throw Error(ErrorKind::kIo, "write failed on " + path_.string());
    }
  }

  ~DatasetSink() {
    if (gz_ != nullptr) gzclose(gz_);
  }

 private:
  void flush() {
    if (buf_.empty()) return;
    if (gz_ != nullptr) {
      if (gzwrite(gz_, buf_.data(), static_cast<unsigned>(buf_.size())) !=
          static_cast<int>(buf_.size())) {
        throw Error(ErrorKind::kIo, "gzip write failed on " + path_.string());
      }
    } else {
      out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    }
    buf_.clear();
  }

  fs::path path_;
  gzFile gz_ = nullptr;
  std::ofstream out_;
  std::string buf_;
};

}  // namespace

GeneratedStats generate(const GeneratorParams& params, const fs::path& path) {
  if (params.arity != 0 && params.arity != 3 && params.arity != 4) {
    throw Error(ErrorKind::kConfig, "arity must be 3, 4 or 0 (mixed)");
  }
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  ZipfSampler zipf(params.distinct_terms, params.zipf);
  std::mt19937_64 rng(params.seed);
  std::vector<std::string> cache(params.distinct_terms);
  std::vector<bool> used(params.distinct_terms, false);
  std::vector<uint64_t> subject_counts(params.distinct_terms, 0);
  auto term = [&](uint64_t rank) -> const std::string& {
    if (cache[rank].empty()) cache[rank] = synthetic_term(rank, params.mean_term_len);
    used[rank] = true;
    return cache[rank];
  };

  GeneratedStats stats;
  stats.params = params;
  DatasetSink sink(path);
  std::string line;
  for (uint64_t i = 0; i < params.statements; ++i) {
    uint8_t arity = params.arity != 0 ? params.arity : static_cast<uint8_t>(3 + (rng() & 1));
    line.clear();
    for (uint8_t k = 0; k < arity; ++k) {
      uint64_t rank = zipf(rng);
      if (k == 0) ++subject_counts[rank];
      line.push_back('<');
      line += term(rank);
      line += "> ";
    }
    line += ".\n";
    sink.write(line);
    stats.plain_bytes += line.size();
    ++stats.statements;
    (arity == 3 ? stats.triples : stats.quads) += 1;
    stats.term_slots += arity;
  }
  sink.close();
  for (uint64_t k = 0; k < params.distinct_terms; ++k) {
    if (used[k]) {
      ++stats.distinct_terms;
      stats.distinct_term_bytes += cache[k].size();
    }
  }
  if (!subject_counts.empty()) {
    stats.top_subject_count = *std::max_element(subject_counts.begin(), subject_counts.end());
  }
  std::ofstream side(stats_path_for(path), std::ios::trunc);
  side << nlohmann::json(stats).dump(2) << "\n";
  if (!side) throw Error(ErrorKind::kIo, "cannot write " + stats_path_for(path).string());
  return stats;
}

namespace {

uint64_t decimal_digits(uint64_t v) {
  uint64_t d = 1;
  while (v >= 10) {
    v /= 10;
    ++d;
  }
  return d;
}

// Total decimal digits of every integer in [lo, hi).
uint64_t digits_in_range(uint64_t lo, uint64_t hi) {
  uint64_t total = 0;
  uint64_t start = lo;
  while (start < hi) {
    uint64_t d = decimal_digits(start);
    uint64_t next = 1;
    for (uint64_t i = 0; i < d; ++i) next *= 10;
    uint64_t end = std::min(hi, next);
    total += (end - start) * d;
    start = end;
  }
  return total;
}

}  // namespace

double predicted_compression_ratio(const GeneratedStats& stats, uint32_t place_count) {
  uint64_t encoded = uint64_t{place_count} * EncodedHeader::kSize + 8 * stats.term_slots;
  if (stats.triples > 0 && stats.quads > 0) encoded += stats.statements;  // arity sidecars
  uint64_t dict = stats.distinct_term_bytes + 2 * stats.distinct_terms +
                  digits_in_range(place_count, place_count + stats.distinct_terms);
  return compute_compression_ratio(stats.plain_bytes, encoded, dict);
}

}  // namespace tripress
