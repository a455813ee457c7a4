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

#include <stdexcept>
#include <cstdint>
#include <string>

namespace tripress {

enum class ErrorKind {
  kConfig,       // invalid configuration or usage
  kParse,        // malformed input statement
  kIo,           // unreadable/unwritable file
  kCorrupt,      // damaged dictionary or encoded file
  kTransport,    // peer unreachable or connection lost
  kProtocol,     // message contract broken (ownership, alignment)
  kConsistency,  // internal invariant violated
  kCapacity,     // id space exhausted
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse errors carry the position of the offending line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, uint64_t line, const std::string& why);

  const std::string& source() const noexcept { return source_; }
  uint64_t line() const noexcept { return line_; }

 private:
  std::string source_;
  uint64_t line_;
};

// Process exit code for an error: 1 usage, 2 data error, 3 internal violation.
int exit_code_for(ErrorKind kind);

}  // namespace tripress
