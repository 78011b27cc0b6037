// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/bench.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace winoq {
namespace {

TEST(Bench, ReportsTheoreticalAlongsideMeasured) {
  BenchOptions o;
  o.repetitions = 3;
  o.warmup = 1;
  const BenchReport r = bench_kernel(plan_conv1d(15, 1), BenchShape{128, 128, 150, 1}, o);
  EXPECT_EQ(r.k, 15u);
  EXPECT_EQ(r.width, 150u);
  EXPECT_DOUBLE_EQ(r.speedup_theoretical, 1.5);
  EXPECT_GT(r.gemm_ns, 0.0);
  EXPECT_GT(r.wino_ns, 0.0);
  EXPECT_DOUBLE_EQ(r.speedup_measured, r.gemm_ns / r.wino_ns);
  EXPECT_EQ(r.gemm_mults, 128u * 128u * 150u * 15u);
  EXPECT_EQ(2 * r.gemm_mults, 3 * r.wino_mults);
}

TEST(Bench, MultRatioMatchesModelForSweep) {
  BenchOptions o;
  o.repetitions = 3;
  o.warmup = 0;
  for (std::size_t k = 3; k <= 16; ++k) {
    const BenchReport r = bench_kernel(plan_conv1d(k, 1), BenchShape{4, 4, 32, 1}, o);
    const Rational q = theoretical_speedup(k);
    EXPECT_DOUBLE_EQ(r.speedup_theoretical, q.value());
    EXPECT_EQ(r.gemm_mults * static_cast<std::uint64_t>(q.den),
              r.wino_mults * static_cast<std::uint64_t>(q.num));
  }
}

TEST(Bench, TooFewRepetitions) {
  BenchOptions o;
  o.repetitions = 1;
  try {
    bench_kernel(plan_conv1d(3, 1), BenchShape{}, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
}

TEST(Bench, PlainInt8Plan) {
  BenchOptions o;
  o.repetitions = 3;
  const BenchReport r = bench_kernel(plan_conv1d(9, 2), BenchShape{4, 4, 40, 1}, o);
  EXPECT_EQ(r.stride, 2u);
  EXPECT_EQ(r.speedup_theoretical, 1.0);
  EXPECT_EQ(r.gemm_mults, r.wino_mults);
}

TEST(Bench, Serialization) {
  BenchOptions o;
  o.repetitions = 3;
  const BenchReport r = bench_kernel(plan_conv1d(5, 1), BenchShape{2, 3, 20, 1}, o);
  const std::string j = to_json(r);
  for (const char* key : {"\"k\"", "\"stride\"", "\"c_in\"", "\"c_out\"", "\"width\"",
                          "\"gemm_ns\"", "\"wino_ns\"", "\"speedup_measured\"",
                          "\"speedup_theoretical\"", "\"gemm_mults\"", "\"wino_mults\""}) {
    EXPECT_NE(j.find(key), std::string::npos) << key;
  }
  EXPECT_EQ(bench_csv_header(),
            "k,stride,c_in,c_out,width,gemm_ns,wino_ns,speedup_measured,speedup_theoretical,"
            "gemm_mults,wino_mults");
  const std::string row = to_csv_row(r);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 10);
  EXPECT_EQ(row.rfind("5,1,2,3,20,", 0), 0u);
}

}  // namespace
}  // namespace winoq
