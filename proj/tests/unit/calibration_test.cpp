// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/calibration.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

namespace winoq {
namespace {

TensorF32 from(std::vector<float> v) {
  const std::size_t n = v.size();
  return TensorF32(Shape{1, 1, n}, std::move(v));
}

Histogram manual(std::vector<std::uint64_t> counts, double max_abs) {
  Histogram h;
  h.counts = std::move(counts);
  const std::size_t n = h.counts.size();
  for (std::size_t i = 0; i <= n; ++i) h.bin_edges.push_back(max_abs * i / n);
  return h;
}

TEST(BuildHistogram, ConstantMagnitudeInLastBin) {
  const Histogram h = build_histogram(from({1, -1, 1, 1}), 4);
  ASSERT_EQ(h.num_bins(), 4u);
  EXPECT_EQ(h.counts[3], 4u);
  EXPECT_EQ(h.bin_edges.front(), 0.0);
  EXPECT_EQ(h.bin_edges.back(), 1.0);
}

TEST(BuildHistogram, ZerosInFirstBin) {
  const Histogram h = build_histogram(from({0, 0, 0}), 16);
  EXPECT_EQ(h.counts[0], 3u);
  EXPECT_EQ(h.total(), 3u);
}

TEST(BuildHistogram, CountsAreConserved) {
  std::mt19937_64 rng(11);
  std::normal_distribution<float> n(0.0f, 1.0f);
  std::vector<float> v(10000);
  for (auto& x : v) x = n(rng);
  const Histogram h = build_histogram(from(v), 2048);
  EXPECT_EQ(h.total(), 10000u);
  for (std::size_t i = 0; i < h.num_bins(); ++i) EXPECT_LT(h.bin_edges[i], h.bin_edges[i + 1]);
}

TEST(BuildHistogram, EmptyTensorRejected) {
  EXPECT_THROW(build_histogram(TensorF32{}, 8), Error);
}

TEST(KlCalibrate, CompactInteriorRegion) {
  std::vector<std::uint64_t> c(2048, 0);
  c[998] = c[999] = c[1000] = 50;
  const Histogram h = manual(c, 2048.0);
  const auto kl = kl_calibrate(h, winograd_activation_scheme());
  EXPECT_FALSE(kl.fell_back);
  EXPECT_EQ(kl.kept_bins, testing::brute_force_kl(h, 63).kept_bins);
  EXPECT_NEAR(kl.threshold, 1001.0, 1.0);
  EXPECT_DOUBLE_EQ(kl.scale, kl.threshold / 63);
}

TEST(KlCalibrate, SingleInteriorBinFallsBackToItsUpperEdge) {
  std::vector<std::uint64_t> c(2048, 0);
  c[1000] = 77;
  const auto kl = kl_calibrate(manual(c, 2048.0), winograd_activation_scheme());
  EXPECT_TRUE(kl.fell_back);
  EXPECT_DOUBLE_EQ(kl.threshold, 1001.0);
  EXPECT_DOUBLE_EQ(kl.scale, 1001.0 / 63);
}

TEST(KlCalibrate, UniformHistogramKeepsNearlyEverything) {
  const Histogram h = manual(std::vector<std::uint64_t>(2048, 100), 3.0);
  const auto kl = kl_calibrate(h, winograd_activation_scheme());
  EXPECT_EQ(kl.kept_bins, testing::brute_force_kl(h, 63).kept_bins);
  EXPECT_NEAR(kl.scale, 3.0 / 63, 0.05 * 3.0 / 63);
}

TEST(KlCalibrate, FarOutlierExcluded) {
  std::mt19937_64 rng(5);
  std::normal_distribution<float> n(0.0f, 1.0f);
  std::vector<float> v;
  for (int i = 0; i < 9991; ++i) v.push_back(n(rng));
  for (int i = 0; i < 9; ++i) v.push_back(i % 2 ? 50.0f : -50.0f);  // 0.09 % of the mass
  const Histogram h = build_histogram(from(v), 2048);
  const auto kl = kl_calibrate(h, winograd_activation_scheme());
  EXPECT_EQ(kl.kept_bins, testing::brute_force_kl(h, 63).kept_bins);
  EXPECT_LT(kl.scale, 50.0 / 63);
  EXPECT_LT(kl.threshold, 50.0);
}

TEST(KlCalibrate, ConstantAndZeroTensorsFallBack) {
  const auto c = kl_calibrate(build_histogram(from(std::vector<float>(100, 0.5f))),
                              winograd_activation_scheme());
  EXPECT_TRUE(c.fell_back);
  EXPECT_DOUBLE_EQ(c.scale, 0.5 / 63);
  const auto z = kl_calibrate(build_histogram(from(std::vector<float>(10, 0.0f))),
                              winograd_activation_scheme());
  EXPECT_TRUE(z.fell_back);
  EXPECT_EQ(z.scale, 1e-8);
}

TEST(KlCalibrate, TooFewBinsFallsBack) {
  const auto kl = kl_calibrate(build_histogram(from({0.1f, 0.5f, 1.0f}), 64),
                               winograd_activation_scheme());
  EXPECT_TRUE(kl.fell_back);
  EXPECT_DOUBLE_EQ(kl.threshold, 1.0);
}

TEST(KlCalibrate, FirstMinimizerWins) {
  // Exact Q == P at every candidate past the mass: divergence 0 from the
  // first candidate that covers it.
  std::vector<std::uint64_t> c(512, 0);
  c[10] = 5;
  c[11] = 5;
  const Histogram h = manual(c, 1.0);
  const auto kl = kl_calibrate(h, winograd_activation_scheme());
  EXPECT_EQ(kl.kept_bins, 127u);
  EXPECT_EQ(kl.divergence, 0.0);
}

// Equality with the brute-force search across shapes and bin counts.
class KlOracle : public ::testing::TestWithParam<std::tuple<int, std::size_t, int>> {};

TEST_P(KlOracle, MatchesBruteForce) {
  const auto [dist, bins, T_s] = GetParam();
  std::mt19937_64 rng(1000 + dist * 17 + bins);
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::exponential_distribution<float> expo(1.0f);
  std::uniform_real_distribution<float> unif(-1.0f, 1.0f);
  std::bernoulli_distribution sign(0.5);
  std::vector<float> v(20000);
  for (std::size_t i = 0; i < v.size(); ++i) {
    switch (dist) {
      case 0: v[i] = gauss(rng); break;
      case 1: v[i] = sign(rng) ? expo(rng) : -expo(rng); break;
      case 2: v[i] = i % 1000 == 0 ? 40.0f * unif(rng) : gauss(rng); break;
      default: v[i] = std::abs(unif(rng)) < 0.5f ? 0.0f : unif(rng); break;
    }
  }
  const Histogram h = build_histogram(from(v), bins);
  const QuantScheme scheme = make_scheme(8, T_s, 1.0);
  const auto kl = kl_calibrate(h, scheme);
  const auto oracle = testing::brute_force_kl(h, T_s);
  ASSERT_FALSE(kl.fell_back);
  EXPECT_EQ(kl.kept_bins, oracle.kept_bins);
  EXPECT_EQ(kl.threshold, oracle.threshold);
  EXPECT_DOUBLE_EQ(kl.scale, oracle.threshold / T_s);
}

INSTANTIATE_TEST_SUITE_P(
    Shapes, KlOracle,
    ::testing::Combine(::testing::Values(0, 1, 2, 3),
                       ::testing::Values(std::size_t{256}, std::size_t{2048}, std::size_t{4096}),
                       ::testing::Values(42, 63)));

TEST(CalibrationReport, Json) {
  CalibrationReport r{"layer0.act", CalibrationMethod::kKl, 0.25, 63, 1.0, 2048, false};
  const std::string j = to_json(r);
  for (const char* key : {"\"tensor\"", "\"method\":\"kl\"", "\"scale\"", "\"T_s\":63",
                          "\"alpha\"", "\"bins\":2048"}) {
    EXPECT_NE(j.find(key), std::string::npos) << key << " in " << j;
  }
}

}  // namespace
}  // namespace winoq
