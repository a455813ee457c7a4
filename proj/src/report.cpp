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

#include "tripress/report.h"

#include <cstdio>

namespace tripress {

double RunReport::statements_per_second() const {
  return seconds > 0 ? static_cast<double>(statements) / seconds : 0.0;
}

double RunReport::megabytes_per_second() const {
  return seconds > 0 ? static_cast<double>(input_plain_bytes) / 1e6 / seconds : 0.0;
}

void to_json(nlohmann::json& j, const RunReport& r) {
  j = nlohmann::json::object();
  j["config"] = r.config;
  j["place_count"] = r.place_count;
  j["ranks"] = r.ranks;
  j["rank"] = r.rank;
  j["loops"] = r.loops;
  j["chunks"] = r.chunks;
  j["statements"] = r.statements;
  j["skipped"] = r.skipped;
  j["input_plain_bytes"] = r.input_plain_bytes;
  j["encoded_bytes"] = r.encoded_bytes;
  j["dict_bytes"] = r.dict_bytes;
  j["dict_entries"] = r.dict_entries;
  j["new_mappings"] = r.new_mappings;
  j["seconds"] = r.seconds;
  j["phase_seconds"] = {{"filter", r.phase_seconds[0]},
                        {"push", r.phase_seconds[1]},
                        {"encode", r.phase_seconds[2]},
                        {"compress", r.phase_seconds[3]}};
  j["compression_ratio"] = r.compression_ratio;
  j["throughput"] = {{"statements_per_second", r.statements_per_second()},
                     {"mb_per_second", r.megabytes_per_second()}};
  j["places"] = r.places;
  j["load"] = r.load();
  if (!r.per_loop.empty()) j["per_loop"] = r.per_loop;
  auto& chunks = j["place_chunks"] = nlohmann::json::array();
  for (const auto& list : r.place_chunks) {
    auto arr = nlohmann::json::array();
    for (const auto& c : list) arr.push_back({c.ordinal, c.statements});
    chunks.push_back(std::move(arr));
  }
  auto& files = j["files"] = nlohmann::json::array();
  for (const auto& f : r.files) files.push_back({{"name", f.name}, {"bytes", f.bytes}});
  if (!r.error.empty()) j["error"] = r.error;
}

void from_json(const nlohmann::json& j, RunReport& r) {
  r.config = j.value("config", nlohmann::json::object());
  j.at("place_count").get_to(r.place_count);
  r.ranks = j.value("ranks", 1u);
  r.rank = j.value("rank", 0u);
  j.at("loops").get_to(r.loops);
  j.at("chunks").get_to(r.chunks);
  j.at("statements").get_to(r.statements);
  r.skipped = j.value("skipped", uint64_t{0});
  j.at("input_plain_bytes").get_to(r.input_plain_bytes);
  j.at("encoded_bytes").get_to(r.encoded_bytes);
  j.at("dict_bytes").get_to(r.dict_bytes);
  j.at("dict_entries").get_to(r.dict_entries);
  j.at("new_mappings").get_to(r.new_mappings);
  j.at("seconds").get_to(r.seconds);
  const auto& ph = j.at("phase_seconds");
  r.phase_seconds = {ph.at("filter").get<double>(), ph.at("push").get<double>(),
                     ph.at("encode").get<double>(), ph.at("compress").get<double>()};
  j.at("compression_ratio").get_to(r.compression_ratio);
  j.at("places").get_to(r.places);
  if (j.contains("per_loop")) j.at("per_loop").get_to(r.per_loop);
  r.place_chunks.clear();
  for (const auto& list : j.value("place_chunks", nlohmann::json::array())) {
    auto& out = r.place_chunks.emplace_back();
    for (const auto& c : list) out.push_back({c.at(0).get<uint64_t>(), c.at(1).get<uint64_t>()});
  }
  r.files.clear();
  for (const auto& f : j.value("files", nlohmann::json::array())) {
    r.files.push_back({f.at("name").get<std::string>(), f.at("bytes").get<uint64_t>()});
  }
  r.error = j.value("error", std::string());
}

EmittedReport emit_report(const LoadReport& load, const RunReport& run) {
  EmittedReport out;
  out.json = run;
  out.json["load"] = load;

  std::string& t = out.table;
  char line[200];
  std::snprintf(line, sizeof line, "places %u  loops %llu  chunks %llu  statements %llu\n",
                run.place_count, static_cast<unsigned long long>(run.loops),
                static_cast<unsigned long long>(run.chunks),
                static_cast<unsigned long long>(run.statements));
  t += line;
  std::snprintf(line, sizeof line,
                "runtime %.3f s  (filter %.3f, push %.3f, encode %.3f, compress %.3f)\n",
                run.seconds, run.phase_seconds[0], run.phase_seconds[1], run.phase_seconds[2],
                run.phase_seconds[3]);
  t += line;
  std::snprintf(line, sizeof line, "throughput %.0f statements/s  %.2f MB/s\n",
                run.statements_per_second(), run.megabytes_per_second());
  t += line;
  std::snprintf(line, sizeof line,
                "input %llu B  encoded %llu B  dictionary %llu B (%llu entries, %llu new)  "
                "ratio %.3f\n",
                static_cast<unsigned long long>(run.input_plain_bytes),
                static_cast<unsigned long long>(run.encoded_bytes),
                static_cast<unsigned long long>(run.dict_bytes),
                static_cast<unsigned long long>(run.dict_entries),
                static_cast<unsigned long long>(run.new_mappings), run.compression_ratio);
  t += line;
  t += "\n";
  t += format_load_table(load);
  return out;
}

}  // namespace tripress
