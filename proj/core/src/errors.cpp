// Copyright 2026 The beatforge Authors.
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

#include "beatforge/errors.hpp"

namespace beatforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kCorruptFile: return "CorruptFile";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNonMonotonicTimes: return "NonMonotonicTimes";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kEventOutOfRange: return "EventOutOfRange";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kWrongDuration: return "WrongDuration";
    case ErrorCode::kHeadOutOfRange: return "HeadOutOfRange";
    case ErrorCode::kEmptyIndex: return "EmptyIndex";
    case ErrorCode::kInsufficientReference: return "InsufficientReference";
    case ErrorCode::kMissingPair: return "MissingPair";
    case ErrorCode::kArchMismatch: return "ArchMismatch";
    case ErrorCode::kCheckpoint: return "Checkpoint";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kNumerical: return "Numerical";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(std::size_t line_no, const std::string& message)
    : Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": " + message),
      line_no_(line_no) {}

}  // namespace beatforge
