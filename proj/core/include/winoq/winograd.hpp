// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "winoq/quantizer.hpp"
#include "winoq/reference_conv.hpp"

namespace winoq {

// F(2,3) transform triple with the weight transform pre-multiplied by 2 so
// every entry is an integer. For d in R^4 and g in R^3:
//   AT * ((G2 * g) .* (BT * d)) / 2 == [corr(d, g)_0, corr(d, g)_1].
struct WinogradBasis {
  std::array<std::array<int, 4>, 4> BT;
  std::array<std::array<int, 3>, 4> G2;
  std::array<std::array<int, 4>, 2> AT;
  int output_rescale_den = 2;

  static const WinogradBasis& standard();

  int input_amplification() const;   // max row abs-sum of BT
  int weight_amplification() const;  // max row abs-sum of G2
  int output_amplification() const;  // max row abs-sum of AT
};

enum class ConvPath { kWinograd, kPlainInt8 };

const char* to_string(ConvPath path);

struct TapRange {
  std::size_t offset = 0;
  std::size_t len = 0;
};

// Split of a k-tap kernel into floor(k/3) contiguous 3-tap Winograd groups at
// offsets 0, 3, 6, ... and a trailing (k mod 3)-tap GEMM remainder.
struct Conv1DPlan {
  std::size_t k = 0;
  std::size_t stride = 1;
  std::vector<std::size_t> wino_groups;
  TapRange remainder{};
  QuantScheme act_scheme = winograd_activation_scheme();
  QuantScheme wt_scheme = winograd_weight_scheme();
  ConvPath path = ConvPath::kWinograd;
};

// Winograd whenever k >= 3 and stride == 1; otherwise a plain INT8 plan
// with full-range schemes.
Conv1DPlan plan_conv1d(std::size_t k, std::size_t stride, const QuantScheme& act_scheme,
                       const QuantScheme& wt_scheme);
inline Conv1DPlan plan_conv1d(std::size_t k, std::size_t stride) {
  return plan_conv1d(k, stride, winograd_activation_scheme(), winograd_weight_scheme());
}

struct OverflowReport {
  int max_transformed_act = 0;
  int max_transformed_wt = 0;
  int storage_limit = 0;
  bool fits_act = false;
  bool fits_wt = false;

  bool fits() const { return fits_act && fits_wt; }
};

OverflowReport check_overflow(const QuantScheme& act_scheme, const QuantScheme& wt_scheme);
std::string to_json(const OverflowReport& report, const QuantScheme& act_scheme,
                    const QuantScheme& wt_scheme);

// BT * d; throws kRange if any |d_i| > T_s of `act_scheme`.
std::array<int, 4> transform_input_tile(const std::array<int, 4>& d, const QuantScheme& act_scheme);
// G2 * g; throws kRange if any |g_i| > T_s of `wt_scheme`.
std::array<int, 4> transform_weight(const std::array<int, 3>& g, const QuantScheme& wt_scheme);

// INT8 Winograd Conv1D. raw is twice the exact integer cross-correlation
// (the G2 factor is kept and removed at dequantization):
// dequantized = raw * s_d * s_g / 2 + bias.
//
// Throws kUnsupportedPlan for non-Winograd plans or a stride / kernel that
// disagrees with the plan, kUnsafeScheme when the operand schemes can
// overflow INT8 in the transform, kOverflowRisk when the int32 accumulators
// lack head-room for c_in.
IntConvResult conv1d_int8_winograd(const QuantizedTensor& input, const QuantizedConv1D& layer,
                                   const Conv1DPlan& plan, int threads = 1);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational reduced(std::int64_t num, std::int64_t den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

// 2k / (4 floor(k/3) + 2 (k mod 3)); kDomain for k < 3.
Rational theoretical_speedup(std::size_t k);

struct MultCounts {
  std::uint64_t gemm_mults = 0;
  std::uint64_t wino_mults = 0;
  std::size_t counted_width = 0;  // out_width rounded down to whole tiles
  bool partial_tile = false;      // out_width was odd

  Rational ratio() const;
};

// Hadamard / GEMM multiplies only; transforms are additions.
MultCounts count_multiplications(const Conv1DPlan& plan, std::size_t out_width, std::size_t c_in,
                                 std::size_t c_out);

}  // namespace winoq
