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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "tripress/parser.h"
#include "tripress/place_engine.h"
#include "tripress/place_group.h"
#include "tripress/report.h"
#include "tripress/storage.h"
#include "tripress/tcp_transport.h"
#include "tripress/transport.h"

namespace tripress {

enum class RunMode { kFresh, kUpdate, kTransactional };
const char* to_string(RunMode mode);

struct RunConfig {
  uint32_t place_count = 1;
  std::size_t chunk_size = kDefaultChunkSize;
  std::size_t chunks_per_loop = 1;
  std::vector<std::filesystem::path> input_paths;
  std::filesystem::path output_dir;
  RunMode mode = RunMode::kFresh;
  std::filesystem::path existing_dict_dir;  // update and transactional modes

  std::vector<HostAddress> hosts;  // empty: in-process transport
  uint32_t rank = 0;               // this process's index into hosts

  bool in_memory = false;
  bool gzip_output = false;
  bool skip_bad = false;
  bool metrics_per_loop = false;
  bool record_events = false;
  bool parallel_transactions = false;
  std::optional<uint64_t> shuffle_seed;

  // Throws kConfig for invalid combinations.
  void validate() const;
  nlohmann::json to_json() const;
};

// Place that processes chunk `index` (0-based within its loop). Round-robin,
// or a per-loop seeded permutation of places when `shuffle_seed` is set.
uint32_t assign_chunk(std::size_t index, uint64_t loop, uint32_t place_count,
                      const std::optional<uint64_t>& shuffle_seed);

// Number of loop iterations for `chunks` chunks: ceil(chunks / (P * c)).
uint64_t loop_count(uint64_t chunks, uint32_t place_count, std::size_t chunks_per_loop);

// Owns the places of this process, their transport and output files for the
// duration of one run. Each process_loop() call is one loop iteration made of
// four barrier-separated phases: filter, push, encode + pull, compress.
class EncodingSession {
 public:
  explicit EncodingSession(RunConfig config);
  ~EncodingSession();

  EncodingSession(const EncodingSession&) = delete;
  EncodingSession& operator=(const EncodingSession&) = delete;

  // Runs one loop over at most P * c chunks, assigned to places by
  // assign_chunk(). Chunks for places hosted by other processes are ignored.
  void process_loop(std::vector<RawChunk> chunks);

  // Closes outputs, writes report.json and then the MANIFEST.
  RunReport finish(uint64_t input_plain_bytes);

  // Records a failure in report.json without committing the run.
  void abort(const std::string& why, uint64_t input_plain_bytes) noexcept;

  const RunConfig& config() const noexcept { return config_; }
  uint64_t loops() const noexcept { return loop_; }
  const PlaceState& place(uint32_t p) const;
  const std::vector<uint32_t>& local_places() const noexcept { return group_->places(); }

 private:
  struct Local;

  void load_existing();
  int64_t now_ns() const;
  RunReport build_report(uint64_t input_plain_bytes);

  RunConfig config_;
  std::unique_ptr<Transport> transport_;
  std::unique_ptr<PlaceGroup> group_;
  std::vector<std::unique_ptr<Local>> locals_;  // indexed by place, null if remote
  uint64_t loop_ = 0;
  uint64_t chunks_ = 0;
  std::array<double, kPhaseCount> phase_seconds_{};
  std::vector<std::vector<MetricCounters>> per_loop_;
  std::chrono::steady_clock::time_point started_;
  bool finished_ = false;
};

// Fresh encoding of config.input_paths into config.output_dir.
RunReport run_encoding(const RunConfig& config);

// Encodes new input against the dictionaries of a previous run.
RunReport run_update(RunConfig config, const std::filesystem::path& existing_dict_dir);

struct BatchLatency {
  uint64_t batch = 0;
  uint64_t statements = 0;
  double seconds = 0;
};

struct TransactionalReport {
  std::vector<BatchLatency> batches;
  RunReport run;

  double mean_seconds() const;
};

// Encodes small batches one loop at a time against loaded dictionaries,
// timing each. With config.parallel_transactions, up to P batches share one
// loop (one per place). `next_batch` returns nullopt when exhausted.
TransactionalReport run_transactional(RunConfig config,
                                      const std::function<std::optional<RawChunk>()>& next_batch);

}  // namespace tripress
