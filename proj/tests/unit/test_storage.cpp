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

#include <functional>
#include <map>
#include <random>

#include "doctest.h"
#include "support.h"
#include "tripress/error.h"
#include "tripress/parser.h"
#include "tripress/storage.h"

using namespace tripress;
using namespace tripress::testing;

namespace {

EncodedStatement enc(std::initializer_list<uint64_t> ids) {
  EncodedStatement e;
  for (uint64_t v : ids) e.ids[e.arity++] = TermId{v};
  return e;
}

std::string le64(uint64_t v) {
  std::string s(8, '\0');
  for (int i = 0; i < 8; ++i) s[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  return s;
}

ErrorKind kind_of_failure(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error");
  return ErrorKind::kConfig;
}

}  // namespace

TEST_SUITE("storage") {
  TEST_CASE("dictionary record format") {
    TempDir dir("storage");
    {
      DictionaryWriter w(dir / "dict-2.tsv", false);
      w.append_mapping(TermId{6}, "http://a");
      CHECK(w.entries() == 1);
      w.close();
    }
    CHECK(slurp(dir / "dict-2.tsv") == "6\thttp://a\n");
    auto loaded = load_dictionary(dir / "dict-2.tsv", 2, 4);
    REQUIRE(loaded.entries.size() == 1);
    CHECK(loaded.entries[0].first == TermId{6});
    CHECK(loaded.entries[0].second == "http://a");
    CHECK(loaded.max_owned_id == TermId{6});
  }

  TEST_CASE("empty dictionary") {
    TempDir dir("storage");
    write_text(dir / "dict-0.tsv", "");
    auto loaded = load_dictionary(dir / "dict-0.tsv", 0, 4);
    CHECK(loaded.entries.empty());
    CHECK(!loaded.max_owned_id);
  }

  TEST_CASE("reload reproduces the written map") {
    TempDir dir("storage");
    const uint32_t P = 5, place = 3;
    std::map<Term, uint64_t> written;
    {
      DictionaryWriter w(dir / "d.tsv", false);
      uint64_t ordinal = 0;
      for (int k = 0; written.size() < 100000; ++k) {
        std::string t = "http://example.org/\"q\"/" + std::to_string(k);
        if (fnv1a_oracle(t) % P != place) continue;
        uint64_t id = (++ordinal) * P + place;
        written[t] = id;
        w.append_mapping(TermId{id}, t);
      }
      w.close();
    }
    std::string text = slurp(dir / "d.tsv");
    CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == written.size());
    auto loaded = load_dictionary(dir / "d.tsv", place, P);
    REQUIRE(loaded.entries.size() == written.size());
    for (const auto& [id, term] : loaded.entries) CHECK(written.at(term) == id.value);
  }

  TEST_CASE("dictionary corruption is detected") {
    TempDir dir("storage");
    auto load = [&](const std::string& text) {
      write_text(dir / "x.tsv", text);
      return kind_of_failure([&] { load_dictionary(dir / "x.tsv", 2, 4); });
    };
    CHECK(load("7\thttp://a\n") == ErrorKind::kCorrupt);
    CHECK(load("2\thttp://a\n") == ErrorKind::kCorrupt);
    CHECK(load("6\thttp://a\n6\thttp://a\n") == ErrorKind::kCorrupt);
    CHECK(load("6 http://a\n") == ErrorKind::kCorrupt);
    CHECK(load("x\thttp://a\n") == ErrorKind::kCorrupt);
    CHECK(load("6\thttp://a") == ErrorKind::kCorrupt);
    std::string foreign = "http://b";
    while (fnv1a_oracle(foreign) % 4 == 2) foreign += "x";
    CHECK(load("6\t" + foreign + "\n") == ErrorKind::kCorrupt);
  }

  TEST_CASE("encoded statement layout") {
    TempDir dir("storage");
    {
      EncodedWriter w(dir.path(), 1, 4, false);
      w.write_encoded(enc({4, 9, 6}));
      w.close();
      CHECK(w.body_bytes() == 24);
      CHECK(w.arity_mode() == 3);
    }
    std::string bytes = slurp(dir / "data-1.bin");
    REQUIRE(bytes.size() == EncodedHeader::kSize + 24);
    CHECK(bytes.substr(0, 4) == "RDE1");
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 3);
    CHECK(bytes.substr(8, 4) == std::string("\x04\0\0\0", 4));
    CHECK(bytes.substr(12, 4) == std::string("\x01\0\0\0", 4));
    CHECK(bytes.substr(16) == le64(4) + le64(9) + le64(6));
    CHECK(!fs::exists(dir / "data-1.arity"));
  }

  TEST_CASE("empty encoded file has only the header") {
    TempDir dir("storage");
    EncodedWriter w(dir.path(), 0, 1, false);
    w.close();
    CHECK(fs::file_size(dir / "data-0.bin") == EncodedHeader::kSize);
    auto data = load_encoded(dir / "data-0.bin");
    CHECK(data.ids.empty());
    CHECK(data.arities.empty());
  }

  TEST_CASE("body size is eight bytes per term slot, mixed arities keep a sidecar") {
    TempDir dir("storage");
    std::mt19937_64 rng(4);
    uint64_t t3 = 0, t4 = 0;
    std::vector<uint8_t> arities;
    {
      EncodedWriter w(dir.path(), 0, 2, false);
      for (int i = 0; i < 1000; ++i) {
        bool quad = rng() % 3 == 0;
        (quad ? t4 : t3)++;
        arities.push_back(quad ? 4 : 3);
        w.write_encoded(quad ? enc({2, 4, 6, 8}) : enc({2, 4, 6}));
      }
      w.close();
      CHECK(w.body_bytes() == 8 * (3 * t3 + 4 * t4));
      CHECK(w.mixed());
    }
    CHECK(fs::file_size(dir / "data-0.bin") == EncodedHeader::kSize + 8 * (3 * t3 + 4 * t4));
    auto data = load_encoded(dir / "data-0.bin");
    CHECK(data.header.arity_mode == 0);
    CHECK(data.arities == arities);
    CHECK(data.ids.size() == 3 * t3 + 4 * t4);
  }

  TEST_CASE("truncated data files are corrupt") {
    TempDir dir("storage");
    {
      EncodedWriter w(dir.path(), 0, 1, false);
      w.write_encoded(enc({1, 2, 3}));
      w.close();
    }
    std::string bytes = slurp(dir / "data-0.bin");
    write_text(dir / "data-0.bin", bytes.substr(0, bytes.size() - 3));
    CHECK(kind_of_failure([&] { load_encoded(dir / "data-0.bin"); }) == ErrorKind::kCorrupt);
    write_text(dir / "data-0.bin", "RDE9" + bytes.substr(4));
    CHECK(kind_of_failure([&] { load_encoded(dir / "data-0.bin"); }) == ErrorKind::kCorrupt);
  }

  TEST_CASE("in-memory outputs reach the disk on close") {
    TempDir dir("storage");
    OutputFile f(dir / "m.txt", true);
    f.write("hello ");
    f.write("world");
    f.patch(0, "J");
    CHECK(fs::file_size(dir / "m.txt") == 0);
    f.close();
    CHECK(slurp(dir / "m.txt") == "Jello world");
  }

  TEST_CASE("compression ratio") {
    CHECK(compute_compression_ratio(100, 10, 15) == doctest::Approx(4.0));
    CHECK(compute_compression_ratio(0, 0, 0) == 0.0);
  }

  TEST_CASE("gzip round trip is identity") {
    TempDir dir("storage");
    std::string text;
    for (int i = 0; i < 5000; ++i) text += std::to_string(i * 7) + "\tterm " + std::to_string(i) + "\n";
    write_text(dir / "f.tsv", text);
    auto gz = gzip_file(dir / "f.tsv");
    CHECK(gz == dir / "f.tsv.gz");
    CHECK(!fs::exists(dir / "f.tsv"));
    CHECK(read_file(gz) == text);
    CHECK(find_output(dir.path(), "f.tsv") == gz);
    CHECK(!find_output(dir.path(), "g.tsv"));
  }

  TEST_CASE("manifest round trip and invalidation") {
    TempDir dir("storage");
    Manifest m;
    m.place_count = 4;
    m.files = {"dict-0.tsv", "data-0.bin"};
    m.write(dir.path());
    CHECK(fs::exists(dir / "MANIFEST"));
    auto back = Manifest::read(dir / "MANIFEST");
    CHECK(back.place_count == 4);
    CHECK(back.files == m.files);
    CHECK(read_run_place_count(dir.path()) == 4);
    invalidate_run(dir.path());
    CHECK(!fs::exists(dir / "MANIFEST"));
    CHECK_THROWS_AS(read_run_place_count(dir.path()), Error);
    CHECK(Manifest::file_name(1, 3) == "MANIFEST.1");
    CHECK(Manifest::file_name(0, 1) == "MANIFEST");
  }
}
