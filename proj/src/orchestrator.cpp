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

#include "tripress/orchestrator.h"

#include <algorithm>
#include <fstream>
#include <future>
#include <numeric>
#include <random>

#include "tripress/error.h"

namespace tripress {

namespace fs = std::filesystem;

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kFresh: return "fresh";
    case RunMode::kUpdate: return "update";
    case RunMode::kTransactional: return "transactional";
  }
  return "?";
}

void RunConfig::validate() const {
  auto bad = [](const std::string& why) { return Error(ErrorKind::kConfig, why); };
  if (place_count == 0) throw bad("place count must be at least 1");
  if (chunk_size == 0) throw bad("chunk size must be at least 1");
  if (chunks_per_loop == 0) throw bad("chunks per loop must be at least 1");
  if (output_dir.empty()) throw bad("output directory is required");
  if (mode != RunMode::kFresh) {
    if (existing_dict_dir.empty()) throw bad("an existing dictionary directory is required");
    if (fs::exists(output_dir) && fs::exists(existing_dict_dir) &&
        fs::equivalent(output_dir, existing_dict_dir)) {
      throw bad("output directory must differ from the dictionary directory");
    }
  }
  if (!hosts.empty()) {
    if (rank >= hosts.size()) throw bad("rank has no entry in the host list");
    if (hosts.size() > place_count) throw bad("more hosts than places");
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["places"] = place_count;
  j["chunk_size"] = chunk_size;
  j["chunks_per_loop"] = chunks_per_loop;
  auto inputs = nlohmann::json::array();
  for (const auto& p : input_paths) inputs.push_back(p.string());
  j["inputs"] = inputs;
  j["output_dir"] = output_dir.string();
  j["mode"] = tripress::to_string(mode);
  if (!existing_dict_dir.empty()) j["dict_dir"] = existing_dict_dir.string();
  auto hs = nlohmann::json::array();
  for (const auto& h : hosts) hs.push_back(h.to_string());
  j["hosts"] = hs;
  j["rank"] = rank;
  j["in_memory"] = in_memory;
  j["gzip_output"] = gzip_output;
  j["skip_bad"] = skip_bad;
  j["parallel_transactions"] = parallel_transactions;
  if (shuffle_seed) {
    j["shuffle_seed"] = *shuffle_seed;
  } else {
    j["shuffle_seed"] = nullptr;
  }
  return j;
}

uint32_t assign_chunk(std::size_t index, uint64_t loop, uint32_t place_count,
                      const std::optional<uint64_t>& shuffle_seed) {
  if (!shuffle_seed) return static_cast<uint32_t>(index % place_count);
  std::mt19937_64 rng(*shuffle_seed ^ (loop * 0x9e3779b97f4a7c15ULL));
  std::vector<uint32_t> perm(place_count);
  std::iota(perm.begin(), perm.end(), 0u);
  for (uint32_t i = place_count - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng() % (uint64_t{i} + 1)]);
  }
  return perm[index % place_count];
}

uint64_t loop_count(uint64_t chunks, uint32_t place_count, std::size_t chunks_per_loop) {
  uint64_t per_loop = uint64_t{place_count} * chunks_per_loop;
  return (chunks + per_loop - 1) / per_loop;
}

// ---------------------------------------------------------------------------

struct EncodingSession::Local {
  Local(uint32_t place, const RunConfig& cfg)
      : state(place, cfg.place_count),
        dict(cfg.output_dir / dict_file_name(place), cfg.in_memory),
        data(cfg.output_dir, place, cfg.place_count, cfg.in_memory) {}

  PlaceState state;
  DictionaryWriter dict;
  EncodedWriter data;
  std::vector<ChunkRecord> chunks;
  std::vector<PhaseEvent> events;
  uint64_t skipped = 0;
  MetricCounters snapshot;
};

EncodingSession::EncodingSession(RunConfig config) : config_(std::move(config)) {
  config_.validate();
  started_ = std::chrono::steady_clock::now();
  fs::create_directories(config_.output_dir);
  invalidate_run(config_.output_dir);

  const uint32_t places = config_.place_count;
  std::vector<uint32_t> local;
  TcpTransport* tcp = nullptr;
  if (config_.hosts.empty()) {
    transport_ = std::make_unique<InProcessTransport>(places);
    local.resize(places);
    std::iota(local.begin(), local.end(), 0u);
  } else {
    auto t = std::make_unique<TcpTransport>(places, config_.hosts, config_.rank);
    tcp = t.get();
    local = t->local_places();
    transport_ = std::move(t);
  }

  locals_.resize(places);
  for (uint32_t p : local) locals_[p] = std::make_unique<Local>(p, config_);
  group_ = std::make_unique<PlaceGroup>(local);
  if (config_.mode != RunMode::kFresh) load_existing();
  if (tcp != nullptr) tcp->connect();
}

EncodingSession::~EncodingSession() = default;

const PlaceState& EncodingSession::place(uint32_t p) const {
  if (p >= locals_.size() || !locals_[p]) {
    throw Error(ErrorKind::kConfig, "place " + std::to_string(p) + " is not hosted here");
  }
  return locals_[p]->state;
}

int64_t EncodingSession::now_ns() const {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now() - started_)
      .count();
}

void EncodingSession::load_existing() {
  const fs::path& dir = config_.existing_dict_dir;
  uint32_t recorded = read_run_place_count(dir);
  if (recorded != config_.place_count) {
    throw Error(ErrorKind::kConfig,
                "dictionaries in " + dir.string() + " were built for " +
                    std::to_string(recorded) + " places, run uses " +
                    std::to_string(config_.place_count));
  }
  group_->finish([&](uint32_t p) {
    Local& L = *locals_[p];
    auto path = find_output(dir, dict_file_name(p));
    if (!path) {
      throw Error(ErrorKind::kCorrupt, dir.string() + ": missing " + dict_file_name(p));
    }
    LoadedDictionary loaded = load_dictionary(*path, p, config_.place_count);
    for (const auto& [id, term] : loaded.entries) L.dict.append_mapping(id, term);
    seed_dictionary(L.state, std::move(loaded.entries));
  });
}

void EncodingSession::process_loop(std::vector<RawChunk> chunks) {
  const uint32_t places = config_.place_count;
  if (chunks.size() > uint64_t{places} * config_.chunks_per_loop) {
    throw Error(ErrorKind::kConfig, "loop given more than places x chunks-per-loop chunks");
  }
  const uint64_t loop = loop_++;
  chunks_ += chunks.size();
  std::vector<std::vector<const RawChunk*>> assigned(places);
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    assigned[assign_chunk(i, loop, places, config_.shuffle_seed)].push_back(&chunks[i]);
  }

  auto phase = [&](Phase ph, const std::function<void(Local&)>& body) {
    auto wall_start = std::chrono::steady_clock::now();
    group_->finish([&](uint32_t p) {
      Local& L = *locals_[p];
      int64_t start = now_ns();
      body(L);
      int64_t end = now_ns();
      L.state.metrics.phase_seconds[static_cast<std::size_t>(ph)] += (end - start) * 1e-9;
      if (config_.record_events) L.events.push_back({loop, ph, p, start, end});
    });
    phase_seconds_[static_cast<std::size_t>(ph)] +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  };

  phase(Phase::kFilter, [&](Local& L) {
    L.state.begin_loop();
    uint64_t lines = 0;
    for (const RawChunk* c : assigned[L.state.place_index]) lines += c->size();
    reserve_loop(L.state, lines);
    for (const RawChunk* c : assigned[L.state.place_index]) {
      uint64_t taken = filter_raw_chunk(L.state, *c, config_.skip_bad, L.skipped);
      L.chunks.push_back({c->ordinal, taken});
    }
  });

  phase(Phase::kPush, [&](Local& L) {
    for (auto& msg : build_term_groups(L.state, loop)) transport_->push_terms(std::move(msg));
  });

  phase(Phase::kEncode, [&](Local& L) {
    for (const auto& msg : transport_->take_terms(L.state.place_index, loop)) {
      L.state.metrics.received_bytes += frame_size(msg);
      transport_->pull_ids(encode_owned_terms(L.state, msg));
    }
    for (const auto& [id, term] : L.state.journal) L.dict.append_mapping(id, term);
    L.state.journal.clear();
  });

  phase(Phase::kCompress, [&](Local& L) {
    for (auto& msg : transport_->take_ids(L.state.place_index, loop)) {
      L.state.metrics.received_id_bytes += frame_size(msg);
      accept_ids(L.state, std::move(msg));
    }
    merge_mappings(L.state);
    for (const auto& enc : compress_statements(L.state)) L.data.write_encoded(enc);
    L.state.begin_loop();
  });

  if (config_.metrics_per_loop) {
    auto& row = per_loop_.emplace_back(places);
    for (uint32_t p : group_->places()) {
      Local& L = *locals_[p];
      row[p] = L.state.metrics - L.snapshot;
      L.snapshot = L.state.metrics;
    }
  }
}

RunReport EncodingSession::build_report(uint64_t input_plain_bytes) {
  RunReport r;
  r.config = config_.to_json();
  r.place_count = config_.place_count;
  r.ranks = config_.hosts.empty() ? 1 : static_cast<uint32_t>(config_.hosts.size());
  r.rank = config_.rank;
  r.loops = loop_;
  r.chunks = chunks_;
  r.input_plain_bytes = input_plain_bytes;
  r.phase_seconds = phase_seconds_;
  r.places.resize(config_.place_count);
  r.place_chunks.resize(config_.place_count);
  r.per_loop = per_loop_;
  for (uint32_t p : group_->places()) {
    const Local& L = *locals_[p];
    r.places[p] = L.state.metrics;
    r.place_chunks[p] = L.chunks;
    r.statements += L.state.metrics.statements;
    r.skipped += L.skipped;
    r.dict_entries += L.state.dict.size();
    r.new_mappings += L.state.metrics.misses;
    r.events.insert(r.events.end(), L.events.begin(), L.events.end());
  }
  std::sort(r.events.begin(), r.events.end(), [](const PhaseEvent& a, const PhaseEvent& b) {
    return std::tie(a.loop, a.phase, a.place) < std::tie(b.loop, b.phase, b.place);
  });
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  return r;
}

RunReport EncodingSession::finish(uint64_t input_plain_bytes) {
  if (finished_) throw Error(ErrorKind::kConsistency, "session already finished");
  finished_ = true;
  transport_->close();
  group_->finish([&](uint32_t p) {
    Local& L = *locals_[p];
    L.dict.close();
    L.data.close();
    if (config_.gzip_output) {
      gzip_file(config_.output_dir / dict_file_name(p));
      gzip_file(config_.output_dir / data_file_name(p));
      if (L.data.mixed()) gzip_file(config_.output_dir / arity_file_name(p));
    }
  });

  RunReport report = build_report(input_plain_bytes);
  Manifest manifest;
  manifest.place_count = config_.place_count;
  manifest.ranks = report.ranks;
  manifest.rank = report.rank;
  const std::string gz = config_.gzip_output ? ".gz" : "";
  for (uint32_t p : group_->places()) {
    std::vector<std::string> names = {dict_file_name(p) + gz, data_file_name(p) + gz};
    if (locals_[p]->data.mixed()) names.push_back(arity_file_name(p) + gz);
    for (const auto& name : names) {
      uint64_t bytes = fs::file_size(config_.output_dir / name);
      report.files.push_back({name, bytes});
      manifest.files.push_back(name);
      if (name.starts_with("dict-")) {
        report.dict_bytes += bytes;
      } else {
        report.encoded_bytes += bytes;
      }
    }
  }
  report.compression_ratio =
      compute_compression_ratio(input_plain_bytes, report.encoded_bytes, report.dict_bytes);

  std::string report_name =
      report.ranks == 1 ? std::string(kReportName) : "report." + std::to_string(report.rank) + ".json";
  {
    std::ofstream out(config_.output_dir / report_name, std::ios::trunc);
    out << nlohmann::json(report).dump(2) << "\n";
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + report_name);
  }
  manifest.write(config_.output_dir);
  return report;
}

void EncodingSession::abort(const std::string& why, uint64_t input_plain_bytes) noexcept {
  try {
    finished_ = true;
    RunReport report = build_report(input_plain_bytes);
    report.error = why;
    std::ofstream out(config_.output_dir / kReportName, std::ios::trunc);
    out << nlohmann::json(report).dump(2) << "\n";
  } catch (...) {
  }
}

// ---------------------------------------------------------------------------

RunReport run_encoding(const RunConfig& config) {
  EncodingSession session(config);
  RawChunkReader reader(config.input_paths, config.chunk_size);
  const std::size_t per_loop = std::size_t{config.place_count} * config.chunks_per_loop;
  auto read_loop = [&] {
    std::vector<RawChunk> batch;
    while (batch.size() < per_loop) {
      auto c = reader.next();
      if (!c) break;
      batch.push_back(std::move(*c));
    }
    return batch;
  };
  try {
    auto batch = read_loop();
    while (!batch.empty()) {
      // Read the next loop's chunks while the places work on this one.
      auto next = std::async(std::launch::async, read_loop);
      session.process_loop(std::move(batch));
      batch = next.get();
    }
    return session.finish(reader.plain_bytes());
  } catch (const std::exception& e) {
    session.abort(e.what(), reader.plain_bytes());
    throw;
  }
}

RunReport run_update(RunConfig config, const fs::path& existing_dict_dir) {
  config.mode = RunMode::kUpdate;
  config.existing_dict_dir = existing_dict_dir;
  return run_encoding(config);
}

double TransactionalReport::mean_seconds() const {
  if (batches.empty()) return 0.0;
  double sum = 0;
  for (const auto& b : batches) sum += b.seconds;
  return sum / static_cast<double>(batches.size());
}

TransactionalReport run_transactional(
    RunConfig config, const std::function<std::optional<RawChunk>()>& next_batch) {
  config.mode = RunMode::kTransactional;
  config.chunks_per_loop = 1;
  EncodingSession session(config);
  TransactionalReport report;
  uint64_t plain_bytes = 0;
  const std::size_t per_loop = config.parallel_transactions ? config.place_count : 1;
  uint64_t batch_no = 0;
  try {
    while (true) {
      std::vector<RawChunk> batch;
      while (batch.size() < per_loop) {
        auto c = next_batch();
        if (!c) break;
        for (const auto& line : c->lines) plain_bytes += line.length + 1;
        batch.push_back(std::move(*c));
      }
      if (batch.empty()) break;
      std::vector<uint64_t> sizes;
      for (const auto& c : batch) sizes.push_back(c.size());
      auto t0 = std::chrono::steady_clock::now();
      session.process_loop(std::move(batch));
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      for (uint64_t n : sizes) report.batches.push_back({batch_no++, n, secs});
    }
    report.run = session.finish(plain_bytes);
  } catch (const std::exception& e) {
    session.abort(e.what(), plain_bytes);
    throw;
  }
  return report;
}

}  // namespace tripress
