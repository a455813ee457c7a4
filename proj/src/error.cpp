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

#include "tripress/error.h"

namespace tripress {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "configuration error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kCorrupt: return "corrupt data";
    case ErrorKind::kTransport: return "transport error";
    case ErrorKind::kProtocol: return "protocol error";
    case ErrorKind::kConsistency: return "consistency violation";
    case ErrorKind::kCapacity: return "capacity exceeded";
  }
  return "error";
}

ParseError::ParseError(const std::string& source, uint64_t line,
                       const std::string& why)
    : Error(ErrorKind::kParse,
            source + ":" + std::to_string(line) + ": " + why),
      source_(source),
      line_(line) {}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 1;
    case ErrorKind::kParse:
    case ErrorKind::kIo:
    case ErrorKind::kCorrupt:
    case ErrorKind::kTransport:
      return 2;
    case ErrorKind::kProtocol:
    case ErrorKind::kConsistency:
    case ErrorKind::kCapacity:
      return 3;
  }
  return 3;
}

}  // namespace tripress
