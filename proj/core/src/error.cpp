// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/error.hpp"

namespace winoq {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidShape: return "invalid-shape";
    case ErrorCode::kBounds: return "bounds";
    case ErrorCode::kInvalidScheme: return "invalid-scheme";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kUnsupportedPlan: return "unsupported-plan";
    case ErrorCode::kOverflowRisk: return "overflow-risk";
    case ErrorCode::kUnsafeScheme: return "unsafe-scheme";
    case ErrorCode::kRange: return "range";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kDeploymentMismatch: return "deployment-mismatch";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace winoq
