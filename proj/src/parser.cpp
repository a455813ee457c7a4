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

#include "tripress/parser.h"

#include <zlib.h>

#include <cctype>
#include <cstring>
#include <utility>

#include "tripress/error.h"

namespace tripress {
namespace {

constexpr std::size_t kReadBlock = 1 << 20;

bool is_ws(char c) noexcept { return c == ' ' || c == '\t'; }

void skip_ws(std::string_view line, std::size_t& pos) noexcept {
  while (pos < line.size() && is_ws(line[pos])) ++pos;
}

// <iri> → content view. Returns false with `why` set on error.
bool scan_iri(std::string_view line, std::size_t& pos, std::string_view& out,
              std::string& why) {
  std::size_t start = ++pos;
  while (pos < line.size() && line[pos] != '>') {
    auto c = static_cast<unsigned char>(line[pos]);
    if (c <= 0x20 || c == '<' || c == '"') {
      why = "invalid character in IRI";
      return false;
    }
    ++pos;
  }
  if (pos >= line.size()) {
    why = "unterminated IRI";
    return false;
  }
  out = line.substr(start, pos - start);
  ++pos;
  if (out.empty()) {
    why = "empty IRI";
    return false;
  }
  if (out.starts_with("_:")) {
    why = "IRI content collides with blank node syntax";
    return false;
  }
  return true;
}

bool is_label_char(unsigned char c) noexcept {
  return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == ':' || c >= 0x80;
}

bool scan_blank(std::string_view line, std::size_t& pos, std::string_view& out,
                std::string& why) {
  std::size_t start = pos;
  pos += 2;
  while (pos < line.size() && is_label_char(static_cast<unsigned char>(line[pos]))) ++pos;
  // A trailing '.' terminates the statement rather than the label.
  while (pos > start + 2 && line[pos - 1] == '.') --pos;
  if (pos == start + 2) {
    why = "empty blank node label";
    return false;
  }
  out = line.substr(start, pos - start);
  return true;
}

bool scan_literal(std::string_view line, std::size_t& pos, std::string_view& out,
                  std::string& why) {
  std::size_t start = pos++;
  bool closed = false;
  while (pos < line.size()) {
    char c = line[pos];
    if (c == '\\') {
      pos += 2;
      continue;
    }
    if (c == '\t') {
      why = "raw TAB inside literal";
      return false;
    }
    ++pos;
    if (c == '"') {
      closed = true;
      break;
    }
  }
  if (!closed) {
    why = "unterminated literal";
    return false;
  }
  if (pos < line.size() && line[pos] == '@') {
    std::size_t tag = ++pos;
    while (pos < line.size() &&
           (std::isalnum(static_cast<unsigned char>(line[pos])) || line[pos] == '-')) {
      ++pos;
    }
    if (pos == tag) {
      why = "empty language tag";
      return false;
    }
  } else if (line.substr(pos).starts_with("^^")) {
    pos += 2;
    if (pos >= line.size() || line[pos] != '<') {
      why = "datatype must be an IRI";
      return false;
    }
    std::string_view ignored;
    if (!scan_iri(line, pos, ignored, why)) return false;
  }
  out = line.substr(start, pos - start);
  return true;
}

}  // namespace

bool is_skippable_line(std::string_view line) noexcept {
  std::size_t pos = 0;
  while (pos < line.size() && (is_ws(line[pos]) || line[pos] == '\r')) ++pos;
  return pos == line.size() || line[pos] == '#';
}

uint8_t parse_terms(std::string_view line, std::array<std::string_view, kMaxArity>& terms,
                    std::string& why) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::size_t pos = 0;
  uint8_t arity = 0;
  while (true) {
    skip_ws(line, pos);
    if (pos >= line.size()) {
      why = "missing terminating '.'";
      return 0;
    }
    char c = line[pos];
    if (c == '.') break;
    if (arity == kMaxArity) {
      why = "more than four terms";
      return 0;
    }
    std::string_view term;
    bool ok = false;
    if (c == '<') {
      ok = scan_iri(line, pos, term, why);
    } else if (c == '_' && pos + 1 < line.size() && line[pos + 1] == ':') {
      if (arity == 1) {
        why = "predicate must be an IRI";
        return 0;
      }
      ok = scan_blank(line, pos, term, why);
    } else if (c == '"') {
      if (arity != 2) {
        why = "literal outside object position";
        return 0;
      }
      ok = scan_literal(line, pos, term, why);
    } else {
      why = std::string("unexpected character '") + c + "'";
      return 0;
    }
    if (!ok) return 0;
    if (pos < line.size() && !is_ws(line[pos]) && line[pos] != '.') {
      why = "missing whitespace between terms";
      return 0;
    }
    terms[arity++] = term;
  }
  ++pos;  // '.'
  skip_ws(line, pos);
  if (pos < line.size() && line[pos] != '#') {
    why = "trailing characters after '.'";
    return 0;
  }
  if (arity < 3) {
    why = "statement needs three or four terms";
    return 0;
  }
  return arity;
}

Statement parse_statement(std::string_view line, std::string_view source, uint64_t line_no) {
  std::array<std::string_view, kMaxArity> t;
  std::string why;
  uint8_t arity = parse_terms(line, t, why);
  if (arity == 0) throw ParseError(std::string(source), line_no, why);
  if (arity == 3) return Statement(Term(t[0]), Term(t[1]), Term(t[2]));
  return Statement(Term(t[0]), Term(t[1]), Term(t[2]), Term(t[3]));
}

// ---------------------------------------------------------------------------

InputFile::InputFile(const std::filesystem::path& path) : path_(path) {
  if (is_gzip(path)) {
    gz_ = gzopen(path.c_str(), "rb");
    if (gz_ == nullptr) throw Error(ErrorKind::kIo, "cannot open " + path.string());
    gzbuffer(static_cast<gzFile>(gz_), 1 << 18);
  } else {
    file_ = std::fopen(path.c_str(), "rb");
    if (file_ == nullptr) {
      throw Error(ErrorKind::kIo,
                  "cannot open " + path.string() + ": " + std::strerror(errno));
    }
  }
}

InputFile::~InputFile() {
  if (gz_ != nullptr) gzclose(static_cast<gzFile>(gz_));
  if (file_ != nullptr) std::fclose(file_);
}

bool InputFile::is_gzip(const std::filesystem::path& path) {
  return path.extension() == ".gz";
}

std::size_t InputFile::read(std::span<char> buf) {
  std::size_t n = 0;
  if (gz_ != nullptr) {
    int r = gzread(static_cast<gzFile>(gz_), buf.data(), static_cast<unsigned>(buf.size()));
    if (r < 0) {
      int code = 0;
      const char* msg = gzerror(static_cast<gzFile>(gz_), &code);
      throw Error(ErrorKind::kIo, "gzip read failed on " + path_.string() + ": " + msg);
    }
    n = static_cast<std::size_t>(r);
  } else {
    n = std::fread(buf.data(), 1, buf.size(), file_);
    if (n == 0 && std::ferror(file_)) {
      throw Error(ErrorKind::kIo, "read failed on " + path_.string());
    }
  }
  bytes_read_ += n;
  return n;
}

std::string read_file(const std::filesystem::path& path) {
  InputFile in(path);
  std::string out;
  std::string block(kReadBlock, '\0');
  while (std::size_t n = in.read(block)) out.append(block.data(), n);
  return out;
}

// ---------------------------------------------------------------------------

std::string RawChunk::label() const {
  return source + "[" + std::to_string(begin_byte) + "," + std::to_string(end_byte) + ")";
}

Chunk parse_chunk(const RawChunk& raw, bool skip_bad) {
  Chunk chunk;
  chunk.ordinal = raw.ordinal;
  chunk.source_label = raw.label();
  chunk.statements.reserve(raw.size());
  std::array<std::string_view, kMaxArity> t;
  std::string why;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    uint8_t arity = parse_terms(raw.line(i), t, why);
    if (arity == 0) {
      if (skip_bad) {
        ++chunk.skipped;
        continue;
      }
      throw ParseError(raw.source, raw.lines[i].number, why);
    }
    if (arity == 3) {
      chunk.statements.emplace_back(Term(t[0]), Term(t[1]), Term(t[2]));
    } else {
      chunk.statements.emplace_back(Term(t[0]), Term(t[1]), Term(t[2]), Term(t[3]));
    }
  }
  return chunk;
}

RawChunkReader::RawChunkReader(std::vector<std::filesystem::path> paths,
                               std::size_t chunk_size)
    : paths_(std::move(paths)), chunk_size_(chunk_size) {
  if (chunk_size_ == 0) throw Error(ErrorKind::kConfig, "chunk size must be at least 1");
}

RawChunkReader::~RawChunkReader() = default;

bool RawChunkReader::fill() {
  if (pending_pos_ > 0) {
    pending_.erase(0, pending_pos_);
    pending_pos_ = 0;
  }
  std::size_t old = pending_.size();
  pending_.resize(old + kReadBlock);
  std::size_t n = file_->read(std::span<char>(pending_.data() + old, kReadBlock));
  pending_.resize(old + n);
  plain_bytes_ += n;
  if (n == 0) file_eof_ = true;
  return n > 0;
}

std::optional<RawChunk> RawChunkReader::next() {
  RawChunk chunk;
  while (true) {
    if (!file_) {
      if (path_index_ >= paths_.size()) return std::nullopt;
      file_ = std::make_unique<InputFile>(paths_[path_index_]);
      pending_.clear();
      pending_pos_ = 0;
      file_offset_ = 0;
      line_no_ = 0;
      file_eof_ = false;
    }
    std::size_t nl = pending_.find('\n', pending_pos_);
    if (nl == std::string::npos && !file_eof_) {
      fill();
      continue;
    }
    if (nl == std::string::npos && pending_pos_ == pending_.size()) {
      file_.reset();
      ++path_index_;
      if (!chunk.lines.empty()) break;
      continue;
    }
    std::size_t end = nl == std::string::npos ? pending_.size() : nl;
    std::string_view line(pending_.data() + pending_pos_, end - pending_pos_);
    uint64_t line_start = file_offset_;
    std::size_t consumed = (nl == std::string::npos ? end : end + 1) - pending_pos_;
    pending_pos_ += consumed;
    file_offset_ += consumed;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (is_skippable_line(line)) continue;
    if (chunk.lines.empty()) {
      chunk.source = paths_[path_index_].string();
      chunk.begin_byte = line_start;
    }
    chunk.lines.push_back({chunk.buffer.size(), static_cast<uint32_t>(line.size()), line_no_});
    chunk.buffer.append(line);
    chunk.end_byte = file_offset_;
    if (chunk.lines.size() == chunk_size_) break;
  }
  chunk.ordinal = next_ordinal_++;
  return chunk;
}

ChunkStream::ChunkStream(std::vector<std::filesystem::path> paths, std::size_t chunk_size,
                         bool skip_bad)
    : reader_(std::move(paths), chunk_size), skip_bad_(skip_bad) {}

std::optional<Chunk> ChunkStream::next() {
  auto raw = reader_.next();
  if (!raw) return std::nullopt;
  return parse_chunk(*raw, skip_bad_);
}

std::vector<Chunk> stream_chunks(const std::vector<std::filesystem::path>& paths,
                                 std::size_t chunk_size, bool skip_bad) {
  ChunkStream stream(paths, chunk_size, skip_bad);
  std::vector<Chunk> out;
  while (auto c = stream.next()) out.push_back(std::move(*c));
  return out;
}

}  // namespace tripress
