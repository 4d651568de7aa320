// Copyright 2026 The knotmorse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace knotmorse {

enum class ErrorCode {
  kInvalidArgument,
  kNotAKnot,
  kTooCloseToKnot,
  kDegenerateProjection,
  kDegenerateCritical,
  kWrongIndex,
  kInconsistent,
  kIndexOutOfRange,
  kUnreliableCount,
  kParse,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotAKnot: return "NotAKnot";
    case ErrorCode::kTooCloseToKnot: return "TooCloseToKnot";
    case ErrorCode::kDegenerateProjection: return "DegenerateProjection";
    case ErrorCode::kDegenerateCritical: return "DegenerateCritical";
    case ErrorCode::kWrongIndex: return "WrongIndex";
    case ErrorCode::kInconsistent: return "Inconsistent";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kUnreliableCount: return "UnreliableCount";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace knotmorse
