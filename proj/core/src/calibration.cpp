// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace winoq {

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Histogram build_histogram(const TensorF32& v, std::size_t num_bins) {
  if (v.empty()) fail(ErrorCode::kPrecondition, "cannot build a histogram of an empty tensor");
  if (num_bins == 0) fail(ErrorCode::kPrecondition, "histogram needs at least one bin");

  double max_abs = 0.0;
  for (float x : v.data()) {
    if (!std::isfinite(x)) fail(ErrorCode::kNumeric, "non-finite value in histogram input");
    max_abs = std::max(max_abs, std::abs(static_cast<double>(x)));
  }

  Histogram h;
  h.counts.assign(num_bins, 0);
  h.bin_edges.resize(num_bins + 1);
  for (std::size_t i = 0; i <= num_bins; ++i) {
    h.bin_edges[i] = max_abs * static_cast<double>(i) / static_cast<double>(num_bins);
  }
  if (max_abs == 0.0) {
    h.counts[0] = v.size();
    return h;
  }
  const double width = max_abs / static_cast<double>(num_bins);
  for (float x : v.data()) {
    auto bin = static_cast<std::size_t>(std::abs(static_cast<double>(x)) / width);
    h.counts[std::min(bin, num_bins - 1)] += 1;
  }
  return h;
}

namespace {

// Adds eps to empty bins and takes the same total mass evenly from the
// occupied ones. Returns false when the result would not be a strictly
// positive distribution.
bool smooth(std::vector<double>& dist, double eps) {
  std::size_t zeros = 0;
  for (double x : dist) zeros += (x == 0.0);
  const std::size_t nonzeros = dist.size() - zeros;
  if (nonzeros == 0) return false;
  const double take = eps * static_cast<double>(zeros) / static_cast<double>(nonzeros);
  for (double& x : dist) {
    x = (x == 0.0) ? eps : x - take;
    if (x <= 0.0) return false;
  }
  return true;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  const double sp = std::accumulate(p.begin(), p.end(), 0.0);
  const double sq = std::accumulate(q.begin(), q.end(), 0.0);
  double kl = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double pn = p[n] / sp;
    const double qn = q[n] / sq;
    if (pn > 0.0) kl += pn * std::log(pn / qn);
  }
  return kl;
}

double divergence_at(const Histogram& hist, std::size_t kept, std::size_t levels, double eps) {
  const auto& counts = hist.counts;
  std::vector<double> p(kept);
  for (std::size_t n = 0; n < kept; ++n) p[n] = static_cast<double>(counts[n]);
  double tail = 0.0;
  for (std::size_t n = kept; n < counts.size(); ++n) tail += static_cast<double>(counts[n]);
  p[kept - 1] += tail;

  // Quantize the unclipped slice into `levels` merged bins, the last one
  // absorbing the remainder, then spread each level over its occupied bins.
  const std::size_t merged = kept / levels;
  std::vector<double> q(kept, 0.0);
  for (std::size_t j = 0; j < levels; ++j) {
    const std::size_t start = j * merged;
    const std::size_t stop = (j + 1 == levels) ? kept : start + merged;
    double level_mass = 0.0;
    std::size_t occupied = 0;
    for (std::size_t n = start; n < stop; ++n) {
      level_mass += static_cast<double>(counts[n]);
      occupied += (p[n] != 0.0);
    }
    if (occupied == 0) continue;
    for (std::size_t n = start; n < stop; ++n) {
      if (p[n] != 0.0) q[n] = level_mass / static_cast<double>(occupied);
    }
  }

  if (!smooth(p, eps) || !smooth(q, eps)) return std::numeric_limits<double>::infinity();
  return kl_divergence(p, q);
}

}  // namespace

KlCalibration kl_calibrate(const Histogram& hist, const QuantScheme& scheme,
                           double smoothing_epsilon) {
  const std::size_t bins = hist.num_bins();
  if (bins == 0 || hist.bin_edges.size() != bins + 1) {
    fail(ErrorCode::kPrecondition, "malformed histogram");
  }
  const std::size_t levels = 2 * static_cast<std::size_t>(scheme.T_s()) + 1;
  const double max_abs = hist.bin_edges.back();

  // A single occupied bin (constant or all-zero magnitudes) carries no
  // shape for the divergence search.
  const auto occupied =
      std::count_if(hist.counts.begin(), hist.counts.end(), [](auto c) { return c > 0; });
  if (bins < levels || occupied < 2 || max_abs == 0.0) {
    // Min-max on the occupied range.
    std::size_t top = bins;
    while (top > 0 && hist.counts[top - 1] == 0) --top;
    KlCalibration out;
    out.fell_back = true;
    out.kept_bins = top;
    out.threshold = top == 0 ? 0.0 : hist.bin_edges[top];
    out.scale = out.threshold == 0.0 ? kEpsilonScale : out.threshold / scheme.T_s();
    return out;
  }

  KlCalibration best;
  best.divergence = std::numeric_limits<double>::infinity();
  best.kept_bins = bins;
  for (std::size_t kept = levels; kept <= bins; ++kept) {
    const double d = divergence_at(hist, kept, levels, smoothing_epsilon);
    if (d < best.divergence) {
      best.divergence = d;
      best.kept_bins = kept;
    }
  }
  best.threshold = hist.bin_edges[best.kept_bins];
  best.scale = best.threshold / scheme.T_s();
  return best;
}

std::string to_json(const CalibrationReport& report) {
  nlohmann::json j = {
      {"tensor", report.tensor},
      {"method", report.method == CalibrationMethod::kKl ? "kl" : "minmax"},
      {"scale", report.scale},
      {"T_s", report.T_s},
      {"alpha", report.alpha},
      {"bins", report.bins},
      {"fallback", report.fallback},
  };
  return j.dump();
}

}  // namespace winoq
