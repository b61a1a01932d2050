// Copyright 2026 The cxlplan Authors
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

#ifndef CXLPLAN_ERROR_HPP_
#define CXLPLAN_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace cxlplan {

enum class ErrorCode {
  kCycleDetected,
  kDanglingReference,
  kDuplicateProducer,
  kMissingProducer,
  kKindMismatch,
  kDuplicateId,
  kInvalidShapeParams,
  kUnknownOp,
  kParseError,
  kIncompleteLUT,
  kInvalidPlan,
  kTooLarge,
  kInvalidArgument,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a code, so the
// CLI can print one structured line regardless of the module that threw.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cxlplan

#endif  // CXLPLAN_ERROR_HPP_
