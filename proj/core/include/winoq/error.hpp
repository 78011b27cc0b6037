// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace winoq {

enum class ErrorCode {
  kInvalidShape,
  kBounds,
  kInvalidScheme,
  kNumeric,
  kShapeMismatch,
  kUnsupportedPlan,
  kOverflowRisk,
  kUnsafeScheme,
  kRange,
  kDomain,
  kPrecondition,
  kDivergence,
  kDeploymentMismatch,
  kIo,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace winoq
