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

#include <zlib.h>

#include <random>

#include "doctest.h"
#include "support.h"
#include "tripress/error.h"
#include "tripress/parser.h"

using namespace tripress;
using namespace tripress::testing;

namespace {

void write_gzip(const fs::path& path, const std::string& text) {
  gzFile gz = gzopen(path.c_str(), "wb");
  REQUIRE(gz != nullptr);
  gzwrite(gz, text.data(), static_cast<unsigned>(text.size()));
  gzclose(gz);
}

std::string numbered_triples(std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    out += "<http://s/" + std::to_string(i) + "> <http://p> \"" + std::to_string(i) + "\" .\n";
  }
  return out;
}

}  // namespace

TEST_SUITE("parser") {
  TEST_CASE("statement forms") {
    Statement a = parse_statement("<http://a> <http://p> <http://b> .");
    CHECK(a == Statement("http://a", "http://p", "http://b"));
    CHECK(a.arity() == 3);

    Statement b = parse_statement("<http://a> <http://p> \"x\"@en .");
    CHECK(b == Statement("http://a", "http://p", "\"x\"@en"));

    Statement c = parse_statement("<http://a> <http://p> <http://b> <http://g> .");
    CHECK(c.arity() == 4);
    CHECK(c[3] == "http://g");

    Statement d = parse_statement("_:x1 <http://p> \"a \\\"q\\\" b\"^^<http://t> .");
    CHECK(d[0] == "_:x1");
    CHECK(d[2] == "\"a \\\"q\\\" b\"^^<http://t>");

    Statement e = parse_statement("  <http://a>\t<http://p>   _:o.  ");
    CHECK(e[2] == "_:o");
  }

  TEST_CASE("malformed statements carry their position") {
    const char* bad[] = {
        "<http://a> <http://p> .",
        "<http://a> <http://p> <http://b>",
        "<http://a <http://p> <http://b> .",
        "\"lit\" <http://p> <http://b> .",
        "<http://a> _:p <http://b> .",
        "<http://a> <http://p> \"unterminated .",
        "<http://a> <http://p> \"tab\there\" .",
        "<_:x> <http://p> <http://b> .",
        "<http://a> <http://p> <http://b> <http://g> <http://h> .",
        "<http://a> <http://p> <http://b> . extra",
        "<> <http://p> <http://b> .",
    };
    for (const char* line : bad) {
      CAPTURE(line);
      try {
        parse_statement(line, "f.nt", 17);
        FAIL("accepted");
      } catch (const ParseError& e) {
        CHECK(e.kind() == ErrorKind::kParse);
        CHECK(e.line() == 17);
        CHECK(e.source() == "f.nt");
      }
    }
  }

  TEST_CASE("skippable lines") {
    CHECK(is_skippable_line(""));
    CHECK(is_skippable_line("   "));
    CHECK(is_skippable_line("# comment"));
    CHECK(!is_skippable_line("<a> <b> <c> ."));
  }

  TEST_CASE("chunk sizes follow the chunk size") {
    TempDir dir("parser");
    write_text(dir / "d.nt", "# header\n" + numbered_triples(5) + "\n" + numbered_triples(5));
    auto chunks = stream_chunks({dir / "d.nt"}, 4);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0].statements.size() == 4);
    CHECK(chunks[1].statements.size() == 4);
    CHECK(chunks[2].statements.size() == 2);
    for (std::size_t i = 0; i < chunks.size(); ++i) CHECK(chunks[i].ordinal == i);
  }

  TEST_CASE("concatenated chunks reproduce the input") {
    TempDir dir("parser");
    std::mt19937_64 rng(5);
    std::string text = random_dataset(rng, 1000, 300);
    write_text(dir / "a.nq", text);
    for (std::size_t size : {1u, 7u, 128u, 5000u}) {
      std::string again;
      for (const auto& c : stream_chunks({dir / "a.nq"}, size)) {
        for (const auto& s : c.statements) again += serialize_statement(s);
      }
      CHECK(again == text);
    }
  }

  TEST_CASE("chunks never span files") {
    TempDir dir("parser");
    write_text(dir / "a.nt", numbered_triples(3));
    write_text(dir / "b.nt", numbered_triples(3));
    RawChunkReader reader({dir / "a.nt", dir / "b.nt"}, 4);
    std::vector<std::size_t> sizes;
    while (auto c = reader.next()) sizes.push_back(c->size());
    CHECK(sizes == std::vector<std::size_t>{3, 3});
    CHECK(reader.plain_bytes() == 2 * numbered_triples(3).size());
  }

  TEST_CASE("gzip input yields the same chunk stream") {
    TempDir dir("parser");
    std::mt19937_64 rng(9);
    std::string text = random_dataset(rng, 3000, 500);
    write_text(dir / "d.nq", text);
    write_gzip(dir / "d.nq.gz", text);
    auto plain = stream_chunks({dir / "d.nq"}, 256);
    auto gz = stream_chunks({dir / "d.nq.gz"}, 256);
    REQUIRE(plain.size() == gz.size());
    for (std::size_t i = 0; i < plain.size(); ++i) CHECK(plain[i].statements == gz[i].statements);
    CHECK(read_file(dir / "d.nq.gz") == text);
  }

  TEST_CASE("one million statements at 140K per chunk") {
    TempDir dir("parser");
    {
      std::ofstream out(dir / "big.nt", std::ios::binary);
      std::string line;
      for (int i = 0; i < 1'000'000; ++i) {
        line = "<http://s/" + std::to_string(i % 5000) + "> <http://p> <http://o/" +
               std::to_string(i) + "> .\n";
        out << line;
      }
    }
    RawChunkReader reader({dir / "big.nt"}, 140'000);
    std::vector<std::size_t> sizes;
    while (auto c = reader.next()) sizes.push_back(c->size());
    REQUIRE(sizes.size() == 8);
    for (int i = 0; i < 7; ++i) CHECK(sizes[i] == 140'000);
    CHECK(sizes[7] == 20'000);
  }

  TEST_CASE("bad lines fail the chunk unless skipped") {
    TempDir dir("parser");
    write_text(dir / "d.nt", "<http://a> <http://p> <http://b> .\nnot rdf\n<http://a> <http://p> <http://c> .\n");
    CHECK_THROWS_AS(stream_chunks({dir / "d.nt"}, 10), ParseError);
    auto chunks = stream_chunks({dir / "d.nt"}, 10, true);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].statements.size() == 2);
    CHECK(chunks[0].skipped == 1);
  }

  TEST_CASE("missing input is an io error") {
    try {
      stream_chunks({"/nonexistent/file.nt"}, 10);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kIo);
    }
  }
}
