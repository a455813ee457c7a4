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
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tripress/term.h"

namespace tripress {

inline constexpr std::size_t kDefaultChunkSize = 100'000;

// Parses one N-Triples/N-Quads statement line. `source` and `line_no` only
// decorate the ParseError thrown for malformed input.
Statement parse_statement(std::string_view line, std::string_view source = "<input>",
                          uint64_t line_no = 0);

// Non-throwing core of parse_statement. On success fills `terms` with views
// into `line` and returns the arity; on failure returns 0 and sets `why`.
uint8_t parse_terms(std::string_view line, std::array<std::string_view, kMaxArity>& terms,
                    std::string& why);

// True for lines the reader skips entirely: blank or `#` comments.
bool is_skippable_line(std::string_view line) noexcept;

// Sequential byte source over a plain or `.gz` file. Counts decompressed bytes.
class InputFile {
 public:
  explicit InputFile(const std::filesystem::path& path);
  ~InputFile();
  InputFile(const InputFile&) = delete;
  InputFile& operator=(const InputFile&) = delete;

  // Reads up to buf.size() bytes; returns 0 at end of file.
  std::size_t read(std::span<char> buf);
  uint64_t bytes_read() const noexcept { return bytes_read_; }
  const std::filesystem::path& path() const noexcept { return path_; }

  static bool is_gzip(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  void* gz_ = nullptr;
  std::FILE* file_ = nullptr;
  uint64_t bytes_read_ = 0;
};

// Reads a whole (possibly gzip-compressed) file into memory.
std::string read_file(const std::filesystem::path& path);

// A block of unparsed statement lines from one file. Chunking never splits
// a statement and never spans two files.
struct RawChunk {
  struct Line {
    uint64_t offset;
    uint32_t length;
    uint64_t number;  // 1-based line number in the source file
  };

  uint64_t ordinal = 0;
  std::string source;  // path of the originating file
  uint64_t begin_byte = 0;
  uint64_t end_byte = 0;
  std::string buffer;
  std::vector<Line> lines;

  std::size_t size() const noexcept { return lines.size(); }
  std::string_view line(std::size_t i) const {
    return std::string_view(buffer).substr(lines[i].offset, lines[i].length);
  }
  std::string label() const;
};

struct Chunk {
  std::vector<Statement> statements;
  std::string source_label;
  uint64_t ordinal = 0;
  uint64_t skipped = 0;  // malformed lines dropped under skip_bad
};

// Parses every line of a raw chunk. Malformed lines throw unless skip_bad,
// in which case they are counted in Chunk::skipped.
Chunk parse_chunk(const RawChunk& raw, bool skip_bad = false);

// Splits a sequence of input files into raw chunks of `chunk_size`
// statements (the last chunk of each file may be smaller). Ordinals are
// dense from 0 across the whole stream.
class RawChunkReader {
 public:
  RawChunkReader(std::vector<std::filesystem::path> paths, std::size_t chunk_size);
  ~RawChunkReader();

  std::optional<RawChunk> next();

  // Plain (decompressed) bytes consumed so far across all files.
  uint64_t plain_bytes() const noexcept { return plain_bytes_; }

 private:
  bool fill();

  std::vector<std::filesystem::path> paths_;
  std::size_t chunk_size_;
  std::size_t path_index_ = 0;
  std::unique_ptr<InputFile> file_;
  std::string pending_;         // bytes read but not yet split into lines
  std::size_t pending_pos_ = 0;
  uint64_t file_offset_ = 0;    // byte offset of pending_[pending_pos_]
  uint64_t line_no_ = 0;
  bool file_eof_ = false;
  uint64_t next_ordinal_ = 0;
  uint64_t plain_bytes_ = 0;
};

// Chunk stream over parsed statements.
class ChunkStream {
 public:
  ChunkStream(std::vector<std::filesystem::path> paths, std::size_t chunk_size,
              bool skip_bad = false);

  std::optional<Chunk> next();
  uint64_t plain_bytes() const noexcept { return reader_.plain_bytes(); }

 private:
  RawChunkReader reader_;
  bool skip_bad_;
};

// Convenience: every chunk of the stream, in order.
std::vector<Chunk> stream_chunks(const std::vector<std::filesystem::path>& paths,
                                 std::size_t chunk_size, bool skip_bad = false);

}  // namespace tripress
