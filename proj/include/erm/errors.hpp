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
#include <string>

namespace erm {

// Every failure mode the pipeline can surface. Codes are stable so callers
// (and tests) can dispatch on them instead of parsing messages.
enum class ErrorCode {
  EmptyDocument,
  OverlapError,
  GapError,
  RangeError,
  BackendError,
  SchemaError,
  ShapeError,
  UnsupportedPass,
  DuplicateRecord,
  IoError,
  ParseError,
  DuplicateId,
  MissingFile,
  UnknownGroup,
  NotFound,
  DegenerateVariance,
  ZeroMarginal,
  EmptyGroup,
  ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::OverlapError: return "OverlapError";
    case ErrorCode::GapError: return "GapError";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::BackendError: return "BackendError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::UnsupportedPass: return "UnsupportedPass";
    case ErrorCode::DuplicateRecord: return "DuplicateRecord";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::UnknownGroup: return "UnknownGroup";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::ZeroMarginal: return "ZeroMarginal";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace erm
