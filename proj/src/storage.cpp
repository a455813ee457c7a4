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

#include "tripress/storage.h"

#include <zlib.h>

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "tripress/error.h"
#include "tripress/parser.h"

namespace tripress {

namespace fs = std::filesystem;

std::string dict_file_name(uint32_t place) { return "dict-" + std::to_string(place) + ".tsv"; }
std::string data_file_name(uint32_t place) { return "data-" + std::to_string(place) + ".bin"; }
std::string arity_file_name(uint32_t place) {
  return "data-" + std::to_string(place) + ".arity";
}

std::optional<fs::path> find_output(const fs::path& dir, const std::string& name) {
  fs::path plain = dir / name;
  if (fs::exists(plain)) return plain;
  fs::path gz = dir / (name + ".gz");
  if (fs::exists(gz)) return gz;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

OutputFile::OutputFile(fs::path path, bool in_memory, bool append)
    : path_(std::move(path)), in_memory_(in_memory), open_(true) {
  if (append && fs::exists(path_)) size_ = fs::file_size(path_);
  if (in_memory_) {
    if (!append) {
      // Truncate now so a stale file never survives a failed run.
      std::FILE* f = std::fopen(path_.c_str(), "wb");
      if (f == nullptr) throw Error(ErrorKind::kIo, "cannot create " + path_.string());
      std::fclose(f);
    }
    return;
  }
  file_ = std::fopen(path_.c_str(), append ? "ab" : "wb");
  if (file_ == nullptr) {
    throw Error(ErrorKind::kIo,
                "cannot create " + path_.string() + ": " + std::strerror(errno));
  }
  std::setvbuf(file_, nullptr, _IOFBF, 1 << 20);
}

OutputFile::~OutputFile() {
  if (file_ != nullptr) std::fclose(file_);
}

OutputFile::OutputFile(OutputFile&& other) noexcept { *this = std::move(other); }

OutputFile& OutputFile::operator=(OutputFile&& other) noexcept {
  if (this != &other) {
    if (file_ != nullptr) std::fclose(file_);
    path_ = std::move(other.path_);
    in_memory_ = other.in_memory_;
    open_ = std::exchange(other.open_, false);
    file_ = std::exchange(other.file_, nullptr);
    memory_ = std::move(other.memory_);
    size_ = std::exchange(other.size_, 0);
  }
  return *this;
}

void OutputFile::write(std::string_view bytes) {
  if (in_memory_) {
    memory_.append(bytes);
  } else if (!bytes.empty() && std::fwrite(bytes.data(), 1, bytes.size(), file_) != bytes.size()) {
    throw Error(ErrorKind::kIo, "write failed on " + path_.string());
  }
  size_ += bytes.size();
}

void OutputFile::patch(uint64_t offset, std::string_view bytes) {
  if (in_memory_) {
    memory_.replace(offset, bytes.size(), bytes);
    return;
  }
  if (std::fflush(file_) != 0 || std::fseek(file_, static_cast<long>(offset), SEEK_SET) != 0 ||
      std::fwrite(bytes.data(), 1, bytes.size(), file_) != bytes.size() ||
      std::fseek(file_, 0, SEEK_END) != 0) {
    throw Error(ErrorKind::kIo, "patch failed on " + path_.string());
  }
}

void OutputFile::close() {
  if (!open_) return;
  open_ = false;
  if (in_memory_) {
    std::FILE* f = std::fopen(path_.c_str(), "ab");
    if (f == nullptr) throw Error(ErrorKind::kIo, "cannot write " + path_.string());
    bool ok = memory_.empty() || std::fwrite(memory_.data(), 1, memory_.size(), f) == memory_.size();
    ok = (std::fclose(f) == 0) && ok;
    memory_ = {};
    if (!ok) throw Error(ErrorKind::kIo, "write failed on " + path_.string());
    return;
  }
  int rc = std::fclose(std::exchange(file_, nullptr));
  if (rc != 0) throw Error(ErrorKind::kIo, "close failed on " + path_.string());
}

// ---------------------------------------------------------------------------

DictionaryWriter::DictionaryWriter(fs::path path, bool in_memory, bool append)
    : out_(std::move(path), in_memory, append) {}

void DictionaryWriter::append_mapping(TermId id, TermView term) {
  line_.clear();
  char digits[24];
  auto res = std::to_chars(digits, digits + sizeof digits, id.value);
  line_.append(digits, res.ptr);
  line_.push_back('\t');
  line_.append(term);
  line_.push_back('\n');
  out_.write(line_);
  ++entries_;
}

// ---------------------------------------------------------------------------

namespace {

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t get_u32(std::string_view b, std::size_t at) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(static_cast<unsigned char>(b[at + i])) << (8 * i);
  return v;
}

uint64_t get_u64(std::string_view b, std::size_t at) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(static_cast<unsigned char>(b[at + i])) << (8 * i);
  return v;
}

}  // namespace

std::string EncodedHeader::encode() const {
  std::string out(kMagic, 4);
  out.push_back(static_cast<char>(kVersion));
  out.push_back(static_cast<char>(arity_mode));
  out.append(2, '\0');
  put_u32(out, place_count);
  put_u32(out, place_index);
  return out;
}

EncodedHeader EncodedHeader::decode(std::string_view bytes, const std::string& source) {
  if (bytes.size() < kSize || bytes.substr(0, 4) != std::string_view(kMagic, 4)) {
    throw Error(ErrorKind::kCorrupt, source + ": not an encoded data file");
  }
  if (static_cast<uint8_t>(bytes[4]) != kVersion) {
    throw Error(ErrorKind::kCorrupt, source + ": unsupported version");
  }
  EncodedHeader h;
  h.arity_mode = static_cast<uint8_t>(bytes[5]);
  if (h.arity_mode != 0 && h.arity_mode != 3 && h.arity_mode != 4) {
    throw Error(ErrorKind::kCorrupt, source + ": bad arity mode");
  }
  h.place_count = get_u32(bytes, 8);
  h.place_index = get_u32(bytes, 12);
  if (h.place_count == 0 || h.place_index >= h.place_count) {
    throw Error(ErrorKind::kCorrupt, source + ": bad place numbers in header");
  }
  return h;
}

EncodedWriter::EncodedWriter(const fs::path& dir, uint32_t place, uint32_t place_count,
                             bool in_memory)
    : data_(dir / data_file_name(place), in_memory),
      arity_(dir / arity_file_name(place), in_memory),
      arity_path_(dir / arity_file_name(place)) {
  header_.place_count = place_count;
  header_.place_index = place;
  data_.write(header_.encode());
}

uint8_t EncodedWriter::arity_mode() const noexcept {
  if (mixed()) return 0;
  return seen_[1] ? 4 : 3;
}

void EncodedWriter::write_encoded(const EncodedStatement& stmt) {
  buf_.clear();
  for (TermId id : stmt.view()) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((id.value >> (8 * i)) & 0xff));
  }
  data_.write(buf_);
  char a = static_cast<char>(stmt.arity);
  arity_.write(std::string_view(&a, 1));
  seen_[stmt.arity == 4 ? 1 : 0] = true;
  ++statements_;
  body_bytes_ += buf_.size();
}

void EncodedWriter::close() {
  if (!data_.is_open()) return;
  header_.arity_mode = arity_mode();
  data_.patch(0, header_.encode());
  data_.close();
  arity_.close();
  if (!mixed()) fs::remove(arity_path_);
}

// ---------------------------------------------------------------------------

LoadedDictionary load_dictionary(const fs::path& path, uint32_t expected_place,
                                 uint32_t place_count) {
  if (place_count == 0 || expected_place >= place_count) {
    throw Error(ErrorKind::kConfig, "bad place numbers for " + path.string());
  }
  std::string text = read_file(path);
  LoadedDictionary out;
  std::unordered_set<uint64_t> ids;
  std::string_view rest(text);
  uint64_t line_no = 0;
  auto corrupt = [&](const std::string& why) {
    return Error(ErrorKind::kCorrupt,
                 path.string() + ":" + std::to_string(line_no) + ": " + why);
  };
  while (!rest.empty()) {
    ++line_no;
    std::size_t nl = rest.find('\n');
    if (nl == std::string_view::npos) throw corrupt("missing final newline");
    std::string_view line = rest.substr(0, nl);
    rest.remove_prefix(nl + 1);
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab + 1 == line.size()) throw corrupt("malformed record");
    uint64_t id = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + tab, id);
    if (ec != std::errc() || ptr != line.data() + tab) throw corrupt("bad id");
    std::string_view term = line.substr(tab + 1);
    if (id < place_count || id % place_count != expected_place) {
      throw corrupt("id " + std::to_string(id) + " outside residue class of place " +
                    std::to_string(expected_place));
    }
    if (destination_unchecked(term, place_count) != expected_place) {
      throw corrupt("term hashes to another place");
    }
    if (!ids.insert(id).second) throw corrupt("duplicate id " + std::to_string(id));
    if (!out.max_owned_id || id > out.max_owned_id->value) out.max_owned_id = TermId{id};
    out.entries.emplace_back(TermId{id}, Term(term));
  }
  return out;
}

EncodedData load_encoded(const fs::path& data_path) {
  std::string bytes = read_file(data_path);
  EncodedData out;
  out.header = EncodedHeader::decode(bytes, data_path.string());
  std::string_view body = std::string_view(bytes).substr(EncodedHeader::kSize);
  if (body.size() % 8 != 0) {
    throw Error(ErrorKind::kCorrupt, data_path.string() + ": body not a multiple of 8 bytes");
  }
  out.ids.reserve(body.size() / 8);
  for (std::size_t i = 0; i < body.size(); i += 8) out.ids.push_back(get_u64(body, i));

  if (out.header.arity_mode == 0) {
    auto side = find_output(data_path.parent_path(), arity_file_name(out.header.place_index));
    if (!side) throw Error(ErrorKind::kCorrupt, data_path.string() + ": missing arity sidecar");
    std::string a = read_file(*side);
    out.arities.assign(a.begin(), a.end());
  } else {
    if (out.ids.size() % out.header.arity_mode != 0) {
      throw Error(ErrorKind::kCorrupt, data_path.string() + ": partial statement at end");
    }
    out.arities.assign(out.ids.size() / out.header.arity_mode, out.header.arity_mode);
  }
  uint64_t slots = 0;
  for (uint8_t a : out.arities) {
    if (a != 3 && a != 4) throw Error(ErrorKind::kCorrupt, data_path.string() + ": bad arity");
    slots += a;
  }
  if (slots != out.ids.size()) {
    throw Error(ErrorKind::kCorrupt, data_path.string() + ": arity sidecar disagrees with body");
  }
  return out;
}

double compute_compression_ratio(uint64_t input_plain_bytes, uint64_t encoded_bytes,
                                 uint64_t dict_bytes) {
  uint64_t out = encoded_bytes + dict_bytes;
  if (out == 0) return 0.0;
  return static_cast<double>(input_plain_bytes) / static_cast<double>(out);
}

fs::path gzip_file(const fs::path& path) {
  fs::path target = path;
  target += ".gz";
  {
    InputFile in(path);
    gzFile gz = gzopen(target.c_str(), "wb6");
    if (gz == nullptr) throw Error(ErrorKind::kIo, "cannot create " + target.string());
    std::string block(1 << 20, '\0');
    while (std::size_t n = in.read(block)) {
      if (gzwrite(gz, block.data(), static_cast<unsigned>(n)) != static_cast<int>(n)) {
        gzclose(gz);
        throw Error(ErrorKind::kIo, "gzip write failed on " + target.string());
      }
    }
    if (gzclose(gz) != Z_OK) throw Error(ErrorKind::kIo, "gzip close failed on " + target.string());
  }
  fs::remove(path);
  return target;
}

// ---------------------------------------------------------------------------

std::string Manifest::file_name(uint32_t rank, uint32_t ranks) {
  if (ranks <= 1) return std::string(kManifestName);
  return std::string(kManifestName) + "." + std::to_string(rank);
}

void Manifest::write(const fs::path& dir) const {
  std::ostringstream text;
  text << "tripress-manifest 1\n"
       << "places " << place_count << "\n"
       << "ranks " << ranks << "\n"
       << "rank " << rank << "\n";
  for (const auto& f : files) text << "file " << f << "\n";
  fs::path tmp = dir / (file_name(rank, ranks) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text.str();
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
  }
  fs::rename(tmp, dir / file_name(rank, ranks));
}

Manifest Manifest::read(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  Manifest m;
  std::string key;
  std::string header;
  std::getline(in, header);
  if (header != "tripress-manifest 1") {
    throw Error(ErrorKind::kCorrupt, path.string() + ": not a manifest");
  }
  while (in >> key) {
    if (key == "places") {
      in >> m.place_count;
    } else if (key == "ranks") {
      in >> m.ranks;
    } else if (key == "rank") {
      in >> m.rank;
    } else if (key == "file") {
      std::string f;
      in >> f;
      m.files.push_back(f);
    } else {
      throw Error(ErrorKind::kCorrupt, path.string() + ": unknown key " + key);
    }
  }
  if (m.place_count == 0 || m.ranks == 0) {
    throw Error(ErrorKind::kCorrupt, path.string() + ": incomplete manifest");
  }
  return m;
}

uint32_t read_run_place_count(const fs::path& dir) {
  fs::path single = dir / kManifestName;
  if (fs::exists(single)) return Manifest::read(single).place_count;
  fs::path first = dir / Manifest::file_name(0, 2);
  if (!fs::exists(first)) {
    throw Error(ErrorKind::kCorrupt, dir.string() + ": no MANIFEST, run incomplete or failed");
  }
  Manifest m0 = Manifest::read(first);
  for (uint32_t r = 1; r < m0.ranks; ++r) {
    fs::path p = dir / Manifest::file_name(r, m0.ranks);
    if (!fs::exists(p)) {
      throw Error(ErrorKind::kCorrupt, dir.string() + ": missing " + p.filename().string());
    }
    if (Manifest::read(p).place_count != m0.place_count) {
      throw Error(ErrorKind::kCorrupt, dir.string() + ": manifests disagree on place count");
    }
  }
  return m0.place_count;
}

void invalidate_run(const fs::path& dir) {
  if (!fs::exists(dir)) return;
  for (const auto& e : fs::directory_iterator(dir)) {
    auto name = e.path().filename().string();
    if (name.starts_with(kManifestName)) fs::remove(e.path());
  }
}

}  // namespace tripress
