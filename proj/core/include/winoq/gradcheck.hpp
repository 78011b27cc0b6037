// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace winoq::rsq {

struct GradcheckConfig {
  std::size_t points = 1000;
  std::size_t sign_points = 10000;
  double tolerance = 1e-4;
  double abs_floor = 1e-10;  // |a - b| <= tol * max(|a|, |b|) + abs_floor passes
  std::uint64_t seed = 0;
};

enum class GradQuantity { kFqGradV, kFqGradS, kNoiseGradV, kNoiseGradS };
inline constexpr std::array<GradQuantity, 4> kGradQuantities{
    GradQuantity::kFqGradV, GradQuantity::kFqGradS, GradQuantity::kNoiseGradV,
    GradQuantity::kNoiseGradS};
const char* to_string(GradQuantity q);

struct QuantityCheck {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double max_rel_err = 0.0;
};

struct GradcheckReport {
  GradcheckConfig config;
  std::array<QuantityCheck, 4> quantities{};
  std::size_t sign_checked = 0;
  std::size_t sign_violations = 0;

  const QuantityCheck& at(GradQuantity q) const { return quantities[static_cast<int>(q)]; }
  bool passed() const;
};

// Central differences of the straight-through surrogate
//   Q~(v, s) = s * (clip(v/s, -T_s, T_s) + r0),  r0 = round(.) - clip(.) frozen at the base point,
// compared with fq_backward and noise_grads at random points away from the
// rounding and clipping kinks, plus the sign structure of the noise-loss
// gradient with respect to v.
GradcheckReport run_gradcheck(const GradcheckConfig& cfg);

std::string to_json(const GradcheckReport& report);

}  // namespace winoq::rsq
