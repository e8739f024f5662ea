// Copyright 2026 The visil Authors.
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
#include <string>
#include <string_view>

namespace visil {

// Numeric values are part of the C ABI (see include/visil/visil.h); append
// only.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kUsage = 2,
  kIo = 3,
  kParseError = 4,
  kCostUnavailable = 5,
  kBackendUnavailable = 6,
  kEmptyRecovery = 7,
  kUnknownFact = 8,
  kFixtureMiss = 9,
  kKeywordParseError = 10,
  kNothingToMask = 11,
  kDomainError = 12,
  kIdentityMismatch = 13,
  kEmptyInput = 14,
  kDegenerateInput = 15,
  kEvaluatorMismatch = 16,
  kCaptionUnavailable = 17,
  kInvalidFrameField = 18,
  kTimecodeParseError = 19,
  kKeyframeParseError = 20,
  kDistractorShortfall = 21,
  kRoleViolation = 22,
  kInternal = 99,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace visil
