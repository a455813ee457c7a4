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

#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "support.h"
#include "tripress/error.h"
#include "tripress/orchestrator.h"
#include "tripress/parser.h"
#include "tripress/verifier.h"

using namespace tripress;
using namespace tripress::testing;

namespace {

RunConfig config_for(const fs::path& in, const fs::path& out, uint32_t P, std::size_t chunk,
                     std::size_t per_loop = 1) {
  RunConfig c;
  c.place_count = P;
  c.chunk_size = chunk;
  c.chunks_per_loop = per_loop;
  c.input_paths = {in};
  c.output_dir = out;
  return c;
}

// term -> id pooled over every dictionary of a run.
std::map<std::string, uint64_t> pooled_dictionary(const fs::path& dir, uint32_t P) {
  std::map<std::string, uint64_t> out;
  for (uint32_t p = 0; p < P; ++p) {
    for (const auto& line : split_lines(read_file(*find_output(dir, dict_file_name(p))))) {
      auto tab = line.find('\t');
      out.emplace(line.substr(tab + 1), std::stoull(line.substr(0, tab)));
    }
  }
  return out;
}

std::vector<std::vector<std::string>> terms_of(const std::vector<std::string>& lines) {
  std::vector<std::vector<std::string>> out;
  for (const auto& l : lines) {
    Statement s = parse_statement(l);
    out.emplace_back(s.terms().begin(), s.terms().end());
  }
  return out;
}

}  // namespace

TEST_SUITE("orchestrator") {
  TEST_CASE("loop arithmetic") {
    CHECK(loop_count(8, 4, 1) == 2);
    CHECK(loop_count(8, 4, 10) == 1);
    CHECK(loop_count(0, 4, 1) == 0);
    CHECK(loop_count(9, 4, 2) == 2);
    for (std::size_t i = 0; i < 8; ++i) CHECK(assign_chunk(i, 0, 4, std::nullopt) == i % 4);
    std::set<uint32_t> seen;
    for (std::size_t i = 0; i < 4; ++i) seen.insert(assign_chunk(i, 3, 4, 99));
    CHECK(seen.size() == 4);
  }

  TEST_CASE("eight chunks on four places take two loops") {
    TempDir dir("orch");
    std::mt19937_64 rng(1);
    write_text(dir / "in.nq", random_dataset(rng, 80, 40));
    auto r = run_encoding(config_for(dir / "in.nq", dir / "c1", 4, 10, 1));
    CHECK(r.loops == 2);
    CHECK(r.chunks == 8);
    for (uint32_t p = 0; p < 4; ++p) CHECK(r.place_chunks[p].size() == 2);
    auto r10 = run_encoding(config_for(dir / "in.nq", dir / "c10", 4, 10, 10));
    CHECK(r10.loops == 1);
  }

  TEST_CASE("configuration errors") {
    TempDir dir("orch");
    write_text(dir / "in.nt", "");
    auto bad = [&](RunConfig c) {
      try {
        run_encoding(c);
      } catch (const Error& e) {
        return e.kind() == ErrorKind::kConfig;
      }
      return false;
    };
    CHECK(bad(config_for(dir / "in.nt", dir / "o", 0, 10)));
    CHECK(bad(config_for(dir / "in.nt", dir / "o", 2, 0)));
    CHECK(bad(config_for(dir / "in.nt", dir / "o", 2, 10, 0)));
    CHECK(bad(config_for(dir / "in.nt", "", 2, 10)));
    auto c = config_for(dir / "in.nt", dir / "o", 2, 10);
    c.hosts = {{"127.0.0.1", 1}, {"127.0.0.1", 2}, {"127.0.0.1", 3}};
    CHECK(bad(c));
  }

  TEST_CASE("report totals and counter definitions against an oracle") {
    TempDir dir("orch");
    std::mt19937_64 rng(2);
    std::string text = random_dataset(rng, 700, 120);
    write_text(dir / "in.nq", text);
    const uint32_t P = 3;
    const std::size_t chunk = 50;
    auto r = run_encoding(config_for(dir / "in.nq", dir / "out", P, chunk, 2));

    auto lines = statement_lines(text);
    auto terms = terms_of(lines);
    std::set<std::string> distinct;
    for (const auto& t : terms) distinct.insert(t.begin(), t.end());
    CHECK(r.statements == lines.size());
    CHECK(r.dict_entries == distinct.size());
    CHECK(r.new_mappings == distinct.size());
    CHECK(r.input_plain_bytes == text.size());

    // Chunk k lives in loop k / (P*c) at place (k % (P*c)) % P.
    const std::size_t n_chunks = (lines.size() + chunk - 1) / chunk;
    std::vector<uint64_t> outgoing(P, 0), local(P, 0), received(P, 0), parsed(P, 0);
    for (std::size_t loop = 0; loop * P * 2 < n_chunks; ++loop) {
      std::vector<std::vector<std::set<std::string>>> groups(P, std::vector<std::set<std::string>>(P));
      for (std::size_t k = loop * P * 2; k < std::min(n_chunks, (loop + 1) * P * 2); ++k) {
        uint32_t place = static_cast<uint32_t>((k - loop * P * 2) % P);
        for (std::size_t i = k * chunk; i < std::min(lines.size(), (k + 1) * chunk); ++i) {
          for (const auto& t : terms[i]) {
            groups[place][fnv1a_oracle(t) % P].insert(t);
            ++parsed[place];
          }
        }
      }
      for (uint32_t o = 0; o < P; ++o) {
        for (uint32_t d = 0; d < P; ++d) {
          (o == d ? local : outgoing)[o] += groups[o][d].size();
          uint64_t frame = 1 + 4 + 4 + 8 + 8;
          for (const auto& t : groups[o][d]) frame += 4 + t.size();
          received[d] += frame;
        }
      }
    }
    uint64_t misses = 0;
    for (uint32_t p = 0; p < P; ++p) {
      CAPTURE(p);
      CHECK(r.places[p].outgoing_terms == outgoing[p]);
      CHECK(r.places[p].local_terms == local[p]);
      CHECK(r.places[p].received_bytes == received[p]);
      CHECK(r.places[p].parsed_terms == parsed[p]);
      CHECK(r.places[p].processed_terms == r.places[p].hits + r.places[p].misses);
      misses += r.places[p].misses;
    }
    CHECK(misses == distinct.size());
    CHECK(verify_run(dir / "out").ok());
  }

  TEST_CASE("phases are separated by barriers") {
    TempDir dir("orch");
    std::mt19937_64 rng(3);
    write_text(dir / "in.nq", random_dataset(rng, 3000, 700));
    auto c = config_for(dir / "in.nq", dir / "out", 4, 100, 2);
    c.record_events = true;
    auto r = run_encoding(c);
    REQUIRE(r.events.size() == r.loops * kPhaseCount * 4);
    std::map<std::pair<uint64_t, int>, std::pair<int64_t, int64_t>> span;  // earliest start, latest end
    for (const auto& e : r.events) {
      auto key = std::make_pair(e.loop, static_cast<int>(e.phase));
      auto [it, fresh] = span.emplace(key, std::make_pair(e.start_ns, e.end_ns));
      if (!fresh) {
        it->second.first = std::min(it->second.first, e.start_ns);
        it->second.second = std::max(it->second.second, e.end_ns);
      }
    }
    int64_t prev_end = -1;
    for (const auto& [key, s] : span) {
      CHECK(s.first >= prev_end);
      prev_end = s.second;
    }
  }

  TEST_CASE("identical configurations produce identical bytes") {
    TempDir dir("orch");
    std::mt19937_64 rng(4);
    write_text(dir / "in.nq", random_dataset(rng, 2000, 300));
    for (auto seed : {std::optional<uint64_t>{}, std::optional<uint64_t>{12345}}) {
      auto a = config_for(dir / "in.nq", dir / "a", 4, 64, 2);
      a.shuffle_seed = seed;
      auto b = a;
      b.output_dir = dir / "b";
      b.in_memory = true;
      run_encoding(a);
      run_encoding(b);
      for (uint32_t p = 0; p < 4; ++p) {
        CHECK(slurp(dir / "a" / dict_file_name(p)) == slurp(dir / "b" / dict_file_name(p)));
        CHECK(slurp(dir / "a" / data_file_name(p)) == slurp(dir / "b" / data_file_name(p)));
      }
    }
  }

  TEST_CASE("shuffled assignment still round trips") {
    TempDir dir("orch");
    std::mt19937_64 rng(5);
    std::string text = random_dataset(rng, 900, 200);
    write_text(dir / "in.nq", text);
    auto c = config_for(dir / "in.nq", dir / "out", 3, 40);
    c.shuffle_seed = 7;
    auto r = run_encoding(c);
    auto lines = statement_lines(text);
    auto parts = decode(dir / "out");
    for (uint32_t p = 0; p < 3; ++p) {
      std::string expected;
      for (const auto& ch : r.place_chunks[p]) {
        for (std::size_t i = ch.ordinal * 40; i < std::min(lines.size(), (ch.ordinal + 1) * 40); ++i) {
          expected += lines[i] + "\n";
        }
      }
      CHECK(parts[p] == expected);
    }
  }

  TEST_CASE("gzip output decodes like plain output") {
    TempDir dir("orch");
    std::mt19937_64 rng(6);
    write_text(dir / "in.nq", random_dataset(rng, 1500, 300));
    run_encoding(config_for(dir / "in.nq", dir / "plain", 2, 100));
    auto c = config_for(dir / "in.nq", dir / "gz", 2, 100);
    c.gzip_output = true;
    run_encoding(c);
    CHECK(fs::exists(dir / "gz" / "dict-0.tsv.gz"));
    CHECK(!fs::exists(dir / "gz" / "dict-0.tsv"));
    CHECK(decode(dir / "gz") == decode(dir / "plain"));
    CHECK(read_file(dir / "gz" / "data-1.bin.gz") == slurp(dir / "plain" / "data-1.bin"));
    CHECK(verify_run(dir / "gz").ok());
  }

  TEST_CASE("malformed input aborts without a manifest unless skipped") {
    TempDir dir("orch");
    write_text(dir / "in.nt", "<http://a> <http://b> <http://c> .\nbroken line\n");
    CHECK_THROWS_AS(run_encoding(config_for(dir / "in.nt", dir / "out", 2, 10)), ParseError);
    CHECK(!fs::exists(dir / "out" / "MANIFEST"));
    auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["error"].get<std::string>().find("in.nt:2: ") != std::string::npos);

    auto c = config_for(dir / "in.nt", dir / "out", 2, 10);
    c.skip_bad = true;
    auto r = run_encoding(c);
    CHECK(r.skipped == 1);
    CHECK(r.statements == 1);
    CHECK(fs::exists(dir / "out" / "MANIFEST"));
  }

  TEST_CASE("per loop metrics add up to the totals") {
    TempDir dir("orch");
    std::mt19937_64 rng(7);
    write_text(dir / "in.nq", random_dataset(rng, 1000, 250));
    auto c = config_for(dir / "in.nq", dir / "out", 2, 100);
    c.metrics_per_loop = true;
    auto r = run_encoding(c);
    REQUIRE(r.per_loop.size() == r.loops);
    for (uint32_t p = 0; p < 2; ++p) {
      uint64_t misses = 0, out = 0;
      for (const auto& row : r.per_loop) {
        misses += row[p].misses;
        out += row[p].outgoing_terms;
      }
      CHECK(misses == r.places[p].misses);
      CHECK(out == r.places[p].outgoing_terms);
    }
  }

  TEST_CASE("update keeps old ids and is idempotent") {
    TempDir dir("orch");
    std::mt19937_64 rng(8);
    std::string d1 = random_dataset(rng, 800, 200);
    std::string d2 = random_dataset(rng, 800, 400);
    write_text(dir / "d1.nq", d1);
    write_text(dir / "d2.nq", d2);
    write_text(dir / "empty.nq", "");
    run_encoding(config_for(dir / "d1.nq", dir / "base", 4, 100));
    auto base = pooled_dictionary(dir / "base", 4);

    auto same = run_update(config_for(dir / "d1.nq", dir / "again", 4, 100), dir / "base");
    CHECK(same.new_mappings == 0);
    for (uint32_t p = 0; p < 4; ++p) {
      CHECK(slurp(dir / "again" / data_file_name(p)) == slurp(dir / "base" / data_file_name(p)));
      CHECK(slurp(dir / "again" / dict_file_name(p)) == slurp(dir / "base" / dict_file_name(p)));
    }

    auto none = run_update(config_for(dir / "empty.nq", dir / "none", 4, 100), dir / "base");
    CHECK(none.statements == 0);
    CHECK(none.new_mappings == 0);
    CHECK(pooled_dictionary(dir / "none", 4) == base);

    auto up = run_update(config_for(dir / "d2.nq", dir / "up", 4, 100), dir / "base");
    auto after = pooled_dictionary(dir / "up", 4);
    for (const auto& [term, id] : base) CHECK(after.at(term) == id);
    CHECK(verify_run(dir / "up").ok());
    CHECK(up.new_mappings == after.size() - base.size());

    // One combined run assigns D's terms the same ids as the two-step schedule.
    std::string both = d1 + d2;
    write_text(dir / "both.nq", both);
    run_encoding(config_for(dir / "both.nq", dir / "union", 4, 100));
    auto uni = pooled_dictionary(dir / "union", 4);
    for (const auto& [term, id] : base) CHECK(uni.at(term) == id);
  }

  TEST_CASE("update rejects mismatched setups") {
    TempDir dir("orch");
    write_text(dir / "d.nt", "<http://a> <http://b> <http://c> .\n");
    run_encoding(config_for(dir / "d.nt", dir / "base", 2, 10));
    auto kind = [&](RunConfig c, const fs::path& dict) {
      try {
        run_update(c, dict);
      } catch (const Error& e) {
        return e.kind();
      }
      FAIL("no error");
      return ErrorKind::kConfig;
    };
    CHECK(kind(config_for(dir / "d.nt", dir / "x", 3, 10), dir / "base") == ErrorKind::kConfig);
    CHECK(kind(config_for(dir / "d.nt", dir / "base", 2, 10), dir / "base") == ErrorKind::kConfig);
    fs::remove(dir / "base" / "MANIFEST");
    CHECK(kind(config_for(dir / "d.nt", dir / "y", 2, 10), dir / "base") != ErrorKind::kConfig);
  }

  TEST_CASE("transactional batches stay consistent with the base") {
    TempDir dir("orch");
    std::mt19937_64 rng(9);
    write_text(dir / "base.nq", random_dataset(rng, 2000, 300));
    write_text(dir / "txn.nq", random_dataset(rng, 1000, 500));
    run_encoding(config_for(dir / "base.nq", dir / "base", 4, 500));
    auto base = pooled_dictionary(dir / "base", 4);

    for (bool parallel : {false, true}) {
      auto c = config_for(dir / "txn.nq", dir / (parallel ? "tp" : "ts"), 4, 100);
      c.existing_dict_dir = dir / "base";
      c.parallel_transactions = parallel;
      RawChunkReader reader({dir / "txn.nq"}, 100);
      auto rep = run_transactional(c, [&] { return reader.next(); });
      CHECK(rep.batches.size() == 10);
      for (const auto& b : rep.batches) CHECK(b.statements == 100);
      CHECK(rep.run.loops == (parallel ? 3u : 10u));
      auto after = pooled_dictionary(c.output_dir, 4);
      for (const auto& [term, id] : base) CHECK(after.at(term) == id);
      CHECK(verify_run(c.output_dir).ok());
      CHECK(rep.mean_seconds() > 0);
    }

    auto c = config_for(dir / "txn.nq", dir / "t0", 4, 100);
    c.existing_dict_dir = dir / "base";
    bool given = false;
    auto rep = run_transactional(c, [&]() -> std::optional<RawChunk> {
      if (given) return std::nullopt;
      given = true;
      return RawChunk{};
    });
    REQUIRE(rep.batches.size() == 1);
    CHECK(rep.batches[0].statements == 0);
    CHECK(rep.run.new_mappings == 0);
  }
}
