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

#include "tripress/metrics.h"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace tripress {

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::kFilter: return "filter";
    case Phase::kPush: return "push";
    case Phase::kEncode: return "encode";
    case Phase::kCompress: return "compress";
  }
  return "?";
}

std::optional<double> MetricCounters::miss_ratio() const {
  uint64_t total = hits + misses;
  if (total == 0) return std::nullopt;
  return static_cast<double>(misses) / static_cast<double>(total);
}

MetricCounters& MetricCounters::operator+=(const MetricCounters& o) {
  outgoing_terms += o.outgoing_terms;
  local_terms += o.local_terms;
  misses += o.misses;
  hits += o.hits;
  processed_terms += o.processed_terms;
  received_bytes += o.received_bytes;
  received_id_bytes += o.received_id_bytes;
  parsed_terms += o.parsed_terms;
  statements += o.statements;
  for (std::size_t i = 0; i < kPhaseCount; ++i) phase_seconds[i] += o.phase_seconds[i];
  return *this;
}

MetricCounters operator-(MetricCounters a, const MetricCounters& b) {
  a.outgoing_terms -= b.outgoing_terms;
  a.local_terms -= b.local_terms;
  a.misses -= b.misses;
  a.hits -= b.hits;
  a.processed_terms -= b.processed_terms;
  a.received_bytes -= b.received_bytes;
  a.received_id_bytes -= b.received_id_bytes;
  a.parsed_terms -= b.parsed_terms;
  a.statements -= b.statements;
  for (std::size_t i = 0; i < kPhaseCount; ++i) a.phase_seconds[i] -= b.phase_seconds[i];
  return a;
}

void to_json(nlohmann::json& j, const MetricCounters& m) {
  j = nlohmann::json{{"outgoing_terms", m.outgoing_terms},
                     {"local_terms", m.local_terms},
                     {"misses", m.misses},
                     {"hits", m.hits},
                     {"processed_terms", m.processed_terms},
                     {"received_bytes", m.received_bytes},
                     {"received_id_bytes", m.received_id_bytes},
                     {"parsed_terms", m.parsed_terms},
                     {"statements", m.statements},
                     {"phase_seconds", m.phase_seconds}};
  if (auto r = m.miss_ratio()) {
    j["miss_ratio"] = *r;
  } else {
    j["miss_ratio"] = nullptr;
  }
}

void from_json(const nlohmann::json& j, MetricCounters& m) {
  j.at("outgoing_terms").get_to(m.outgoing_terms);
  j.at("local_terms").get_to(m.local_terms);
  j.at("misses").get_to(m.misses);
  j.at("hits").get_to(m.hits);
  j.at("processed_terms").get_to(m.processed_terms);
  j.at("received_bytes").get_to(m.received_bytes);
  j.at("received_id_bytes").get_to(m.received_id_bytes);
  j.at("parsed_terms").get_to(m.parsed_terms);
  j.at("statements").get_to(m.statements);
  j.at("phase_seconds").get_to(m.phase_seconds);
}

namespace {

template <typename Get>
MetricSummary summarize(std::span<const MetricCounters> places, Get get) {
  MetricSummary s;
  if (places.empty()) return s;
  s.max = -std::numeric_limits<double>::infinity();
  s.min = std::numeric_limits<double>::infinity();
  double sum = 0;
  for (const auto& m : places) {
    double v = get(m);
    s.max = std::max(s.max, v);
    s.min = std::min(s.min, v);
    sum += v;
  }
  s.avg = sum / static_cast<double>(places.size());
  return s;
}

}  // namespace

LoadReport aggregate(std::span<const MetricCounters> places) {
  LoadReport r;
  r.places = static_cast<uint32_t>(places.size());
  r.outgoing_terms = summarize(places, [](auto& m) { return double(m.outgoing_terms); });
  r.local_terms = summarize(places, [](auto& m) { return double(m.local_terms); });
  r.misses = summarize(places, [](auto& m) { return double(m.misses); });
  r.hits = summarize(places, [](auto& m) { return double(m.hits); });
  r.miss_ratio = summarize(places, [](auto& m) { return m.miss_ratio().value_or(0.0); });
  r.processed_terms = summarize(places, [](auto& m) { return double(m.processed_terms); });
  r.received_bytes = summarize(places, [](auto& m) { return double(m.received_bytes); });
  r.parsed_terms = summarize(places, [](auto& m) { return double(m.parsed_terms); });
  r.statements = summarize(places, [](auto& m) { return double(m.statements); });
  return r;
}

std::vector<std::pair<std::string, MetricSummary>> LoadReport::rows() const {
  return {{"outgoing_terms", outgoing_terms}, {"local_terms", local_terms},
          {"misses", misses},                 {"hits", hits},
          {"miss_ratio", miss_ratio},         {"processed_terms", processed_terms},
          {"received_bytes", received_bytes}, {"parsed_terms", parsed_terms},
          {"statements", statements}};
}

void to_json(nlohmann::json& j, const LoadReport& r) {
  j = nlohmann::json::object();
  j["places"] = r.places;
  for (const auto& [name, s] : r.rows()) {
    j[name] = {{"max", s.max}, {"min", s.min}, {"avg", s.avg}, {"skew", s.skew()}};
  }
}

std::string format_load_table(const LoadReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %16s %16s %16s %8s\n", "metric", "max", "min",
                "avg", "skew");
  out += line;
  for (const auto& [name, s] : report.rows()) {
    if (name == "miss_ratio") {
      std::snprintf(line, sizeof line, "%-16s %16.4f %16.4f %16.4f %8.3f\n", name.c_str(),
                    s.max, s.min, s.avg, s.skew());
    } else {
      std::snprintf(line, sizeof line, "%-16s %16.0f %16.0f %16.1f %8.3f\n", name.c_str(),
                    s.max, s.min, s.avg, s.skew());
    }
    out += line;
  }
  return out;
}

}  // namespace tripress
