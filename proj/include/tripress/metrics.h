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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace tripress {

// Pipeline phases of one loop iteration, separated by global barriers.
enum class Phase : uint8_t { kFilter = 0, kPush = 1, kEncode = 2, kCompress = 3 };
inline constexpr std::size_t kPhaseCount = 4;
const char* to_string(Phase phase);

// Per-place load counters. All counters accumulate over the whole run.
struct MetricCounters {
  uint64_t outgoing_terms = 0;     // unique terms sent to a different place
  uint64_t local_terms = 0;        // unique terms owned by the sending place itself
  uint64_t misses = 0;             // encode requests that created a new id
  uint64_t hits = 0;               // encode requests answered from the dictionary
  uint64_t processed_terms = 0;    // terms encoded at this place (hits + misses)
  uint64_t received_bytes = 0;     // term-frame bytes delivered to this place
  uint64_t received_id_bytes = 0;  // id-frame bytes delivered to this place
  uint64_t parsed_terms = 0;       // terms read from this place's chunks
  uint64_t statements = 0;         // statements encoded by this place
  std::array<double, kPhaseCount> phase_seconds{};

  // misses / (hits + misses); empty when nothing was encoded.
  std::optional<double> miss_ratio() const;

  MetricCounters& operator+=(const MetricCounters& other);
  friend MetricCounters operator-(MetricCounters a, const MetricCounters& b);
};

void to_json(nlohmann::json& j, const MetricCounters& m);
void from_json(const nlohmann::json& j, MetricCounters& m);

struct MetricSummary {
  double max = 0;
  double min = 0;
  double avg = 0;
  // max / avg; 1.0 when avg is zero (nothing to be imbalanced about).
  double skew() const { return avg == 0 ? 1.0 : max / avg; }
};

// Max/min/average of every counter across places.
struct LoadReport {
  uint32_t places = 0;
  MetricSummary outgoing_terms;
  MetricSummary local_terms;
  MetricSummary misses;
  MetricSummary hits;
  MetricSummary miss_ratio;
  MetricSummary processed_terms;
  MetricSummary received_bytes;
  MetricSummary parsed_terms;
  MetricSummary statements;

  // (name, summary) pairs in display order.
  std::vector<std::pair<std::string, MetricSummary>> rows() const;
};

LoadReport aggregate(std::span<const MetricCounters> places);

void to_json(nlohmann::json& j, const LoadReport& r);

// Aligned text table with one row per metric: max, min, avg, skew.
std::string format_load_table(const LoadReport& report);

}  // namespace tripress
