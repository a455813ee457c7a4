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

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tripress/term.h"

namespace tripress {

// Output files of one place inside a run directory.
std::string dict_file_name(uint32_t place);    // dict-<p>.tsv
std::string data_file_name(uint32_t place);    // data-<p>.bin
std::string arity_file_name(uint32_t place);   // data-<p>.arity
inline constexpr std::string_view kManifestName = "MANIFEST";
inline constexpr std::string_view kReportName = "report.json";

// Resolves `dir/name`, falling back to `dir/name.gz` when only the gzip form
// exists. Returns nullopt when neither exists.
std::optional<std::filesystem::path> find_output(const std::filesystem::path& dir,
                                                 const std::string& name);

// Append-only byte stream. In memory mode nothing reaches the disk until
// close(); otherwise writes go through a buffered FILE.
class OutputFile {
 public:
  OutputFile() = default;
  OutputFile(std::filesystem::path path, bool in_memory, bool append = false);
  ~OutputFile();
  OutputFile(OutputFile&& other) noexcept;
  OutputFile& operator=(OutputFile&& other) noexcept;

  void write(std::string_view bytes);
  // Overwrites bytes at `offset` (which must already have been written).
  void patch(uint64_t offset, std::string_view bytes);
  void close();

  uint64_t size() const noexcept { return size_; }
  bool is_open() const noexcept { return open_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  bool in_memory_ = false;
  bool open_ = false;
  std::FILE* file_ = nullptr;
  std::string memory_;
  uint64_t size_ = 0;
};

// Dictionary journal: one "id<TAB>term<LF>" record per mapping.
class DictionaryWriter {
 public:
  DictionaryWriter() = default;
  DictionaryWriter(std::filesystem::path path, bool in_memory, bool append = false);

  void append_mapping(TermId id, TermView term);
  void close() { out_.close(); }
  uint64_t entries() const noexcept { return entries_; }
  uint64_t bytes() const noexcept { return out_.size(); }

 private:
  OutputFile out_;
  uint64_t entries_ = 0;
  std::string line_;
};

// Header of data-<p>.bin, 16 bytes:
//   "RDE1" | u8 version | u8 arity mode (3, 4, or 0 = mixed) | u16 zero
//   | u32 place count | u32 place index
struct EncodedHeader {
  static constexpr char kMagic[4] = {'R', 'D', 'E', '1'};
  static constexpr uint8_t kVersion = 1;
  static constexpr std::size_t kSize = 16;

  uint8_t arity_mode = 3;
  uint32_t place_count = 0;
  uint32_t place_index = 0;

  std::string encode() const;
  static EncodedHeader decode(std::string_view bytes, const std::string& source);
};

// Binary id stream: 8 bytes little-endian per id. When a place writes both
// triples and quads, per-statement arities go to the .arity sidecar and the
// header says "mixed"; otherwise the sidecar is removed on close.
class EncodedWriter {
 public:
  EncodedWriter() = default;
  EncodedWriter(const std::filesystem::path& dir, uint32_t place, uint32_t place_count,
                bool in_memory);

  void write_encoded(const EncodedStatement& stmt);
  void close();

  uint64_t statements() const noexcept { return statements_; }
  uint64_t body_bytes() const noexcept { return body_bytes_; }
  uint8_t arity_mode() const noexcept;
  // File bytes on disk after close (data file plus sidecar if kept).
  uint64_t bytes() const noexcept { return data_.size() + (mixed() ? arity_.size() : 0); }
  bool mixed() const noexcept { return seen_[0] && seen_[1]; }

 private:
  OutputFile data_;
  OutputFile arity_;
  std::filesystem::path arity_path_;
  EncodedHeader header_;
  bool seen_[2] = {false, false};
  uint64_t statements_ = 0;
  uint64_t body_bytes_ = 0;
  std::string buf_;
};

struct LoadedDictionary {
  std::vector<std::pair<TermId, Term>> entries;  // file order
  std::optional<TermId> max_owned_id;
};

// Reads dict-<p>.tsv (plain or .gz). Throws kCorrupt when an id is not in
// place `expected_place`'s residue class, is reused, or a line is malformed.
LoadedDictionary load_dictionary(const std::filesystem::path& path, uint32_t expected_place,
                                 uint32_t place_count);

struct EncodedData {
  EncodedHeader header;
  std::vector<uint64_t> ids;
  std::vector<uint8_t> arities;  // one per statement
};

// Reads data-<p>.bin with its sidecar when mixed.
EncodedData load_encoded(const std::filesystem::path& data_path);

// plain input bytes / (encoded bytes + dictionary bytes)
double compute_compression_ratio(uint64_t input_plain_bytes, uint64_t encoded_bytes,
                                 uint64_t dict_bytes);

// gzip-compresses `path` into `path.gz` and removes the original.
std::filesystem::path gzip_file(const std::filesystem::path& path);

// Run commit marker: written last, so a directory without it holds a failed
// or unfinished run.
struct Manifest {
  uint32_t place_count = 0;
  uint32_t ranks = 1;
  uint32_t rank = 0;
  std::vector<std::string> files;

  static std::string file_name(uint32_t rank, uint32_t ranks);
  void write(const std::filesystem::path& dir) const;
  static Manifest read(const std::filesystem::path& path);
};

// Place count recorded by the manifest(s) of a completed run directory.
// Throws kCorrupt/kIo when the run is incomplete.
uint32_t read_run_place_count(const std::filesystem::path& dir);

// Removes commit markers so a rerun into `dir` is invalid until it finishes.
void invalidate_run(const std::filesystem::path& dir);

}  // namespace tripress
