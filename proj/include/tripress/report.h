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
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tripress/metrics.h"

namespace tripress {

// One place's activity in one phase of one loop; nanoseconds since run start.
struct PhaseEvent {
  uint64_t loop = 0;
  Phase phase = Phase::kFilter;
  uint32_t place = 0;
  int64_t start_ns = 0;
  int64_t end_ns = 0;
};

struct ChunkRecord {
  uint64_t ordinal = 0;
  uint64_t statements = 0;
};

struct FileEntry {
  std::string name;
  uint64_t bytes = 0;
};

// Outcome of one orchestrator run; serialized to report.json.
struct RunReport {
  nlohmann::json config = nlohmann::json::object();
  uint32_t place_count = 0;
  uint32_t ranks = 1;
  uint32_t rank = 0;
  uint64_t loops = 0;
  uint64_t chunks = 0;
  uint64_t statements = 0;
  uint64_t skipped = 0;
  uint64_t input_plain_bytes = 0;
  uint64_t encoded_bytes = 0;
  uint64_t dict_bytes = 0;
  uint64_t dict_entries = 0;
  uint64_t new_mappings = 0;
  double seconds = 0;
  std::array<double, kPhaseCount> phase_seconds{};
  double compression_ratio = 0;

  std::vector<MetricCounters> places;                 // indexed by place
  std::vector<std::vector<MetricCounters>> per_loop;  // [loop][place], opt-in
  std::vector<std::vector<ChunkRecord>> place_chunks; // output order per place
  std::vector<FileEntry> files;
  std::vector<PhaseEvent> events;                     // not serialized
  std::string error;

  double statements_per_second() const;
  double megabytes_per_second() const;  // plain input MB (1e6 bytes) per second
  LoadReport load() const { return aggregate(places); }
};

void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);

struct EmittedReport {
  nlohmann::json json;
  std::string table;
};

// JSON document and aligned text rendering of a run and its load summary.
EmittedReport emit_report(const LoadReport& load, const RunReport& run);

}  // namespace tripress
