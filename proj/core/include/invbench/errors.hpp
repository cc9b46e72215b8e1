// Copyright 2026 The invbench Authors.
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

#ifndef INVBENCH_ERRORS_HPP_
#define INVBENCH_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace invbench {

enum class ErrorCode {
  kInvalidConfig,
  kDimensionMismatch,
  kSingularCovariance,
  kSingularDesign,
  kNonFiniteObjective,
  kIoError,
};

// Stable tag used in result rows (the `status` column) and diagnostics.
std::string_view ErrorCodeName(ErrorCode code);

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
      return "InvalidConfig";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kSingularCovariance:
      return "SingularCovariance";
    case ErrorCode::kSingularDesign:
      return "SingularDesign";
    case ErrorCode::kNonFiniteObjective:
      return "NonFiniteObjective";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

}  // namespace invbench

#endif  // INVBENCH_ERRORS_HPP_
