/*
 Copyright 2026 The actsched Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef ACTSCHED_ERROR_HPP
#define ACTSCHED_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace actsched {

enum class ErrorKind {
  kInvalidArgument,
  kNonFinite,
  kZeroColumn,
  kIntervalOutOfRange,
  kNegativeValue,
  kOutOfDomain,
  kDomainMismatch,
  kInsufficientLevelSet,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kZeroColumn: return "ZeroColumn";
    case ErrorKind::kIntervalOutOfRange: return "IntervalOutOfRange";
    case ErrorKind::kNegativeValue: return "NegativeValue";
    case ErrorKind::kOutOfDomain: return "OutOfDomain";
    case ErrorKind::kDomainMismatch: return "DomainMismatch";
    case ErrorKind::kInsufficientLevelSet: return "InsufficientLevelSet";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
///
/// Validation failures (bad input shapes, zero columns, budgets outside
/// (0, mT)) are distinguished from numeric failures by `is_validation()`;
/// the CLI maps them to different exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  bool is_validation() const noexcept {
    return kind_ == ErrorKind::kInvalidArgument ||
           kind_ == ErrorKind::kZeroColumn ||
           kind_ == ErrorKind::kNegativeValue ||
           kind_ == ErrorKind::kDomainMismatch ||
           kind_ == ErrorKind::kIntervalOutOfRange;
  }

 private:
  ErrorKind kind_;
};

}  // namespace actsched

#endif  // ACTSCHED_ERROR_HPP
