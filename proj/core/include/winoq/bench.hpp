// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "winoq/winograd.hpp"

namespace winoq {

struct BenchShape {
  std::size_t c_in = 1;
  std::size_t c_out = 1;
  std::size_t width = 150;  // input length; "same" padding keeps the output length equal
  std::size_t batch = 1;
};

struct BenchOptions {
  std::size_t repetitions = 10;
  std::size_t warmup = 2;
  int threads = 1;
  std::uint64_t seed = 0;
};

struct BenchReport {
  std::size_t k = 0;
  std::size_t stride = 1;
  std::size_t c_in = 0;
  std::size_t c_out = 0;
  std::size_t width = 0;
  double gemm_ns = 0.0;
  double wino_ns = 0.0;
  double speedup_measured = 0.0;
  double speedup_theoretical = 0.0;
  std::uint64_t gemm_mults = 0;
  std::uint64_t wino_mults = 0;
};

// Median wall-clock time of the INT8 GEMM and INT8 Winograd operators on the
// same random in-range operands. Plans on the plain INT8 path time the GEMM
// operator twice and report a theoretical speedup of 1. Throws kPrecondition
// when repetitions < 3.
BenchReport bench_kernel(const Conv1DPlan& plan, const BenchShape& shape,
                         const BenchOptions& options = {});

std::string to_json(const BenchReport& report);
std::string bench_csv_header();
std::string to_csv_row(const BenchReport& report);

}  // namespace winoq
