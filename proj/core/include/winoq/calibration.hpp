// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "winoq/quantizer.hpp"

namespace winoq {

// Histogram of |v| over uniform bins spanning [0, max|v|].
struct Histogram {
  std::vector<double> bin_edges;  // num_bins + 1 entries
  std::vector<std::uint64_t> counts;

  std::size_t num_bins() const { return counts.size(); }
  std::uint64_t total() const;
};

inline constexpr std::size_t kDefaultHistogramBins = 2048;
inline constexpr double kKlSmoothingEpsilon = 1e-4;

Histogram build_histogram(const TensorF32& v, std::size_t num_bins = kDefaultHistogramBins);

struct KlCalibration {
  double scale = 0.0;
  double threshold = 0.0;       // chosen clip threshold tau
  std::size_t kept_bins = 0;    // tau == bin_edges[kept_bins]
  double divergence = 0.0;      // KL(P || Q) at the chosen threshold
  bool fell_back = false;       // degenerate histogram; min-max scale returned
};

// Entropy-calibration search: candidate thresholds are bin_edges[i] for
// i in [2*T_s + 1, num_bins]; the first minimizer of KL(P || Q) wins.
// Histograms with fewer than two occupied bins, or fewer bins than levels,
// get the min-max threshold (upper edge of the last occupied bin) and
// `fell_back` set.
KlCalibration kl_calibrate(const Histogram& hist, const QuantScheme& scheme,
                           double smoothing_epsilon = kKlSmoothingEpsilon);

enum class CalibrationMethod { kKl, kMinMax };

struct CalibrationReport {
  std::string tensor;
  CalibrationMethod method = CalibrationMethod::kKl;
  double scale = 0.0;
  int T_s = 0;
  double alpha = 1.0;
  std::size_t bins = 0;
  bool fallback = false;
};

std::string to_json(const CalibrationReport& report);

}  // namespace winoq
