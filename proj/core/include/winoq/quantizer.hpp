// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "winoq/tensor.hpp"

namespace winoq {

// Symmetric integer range [-T_s, T_s] with T_s = floor(base_T / alpha),
// stored in `storage_bits`-wide signed integers.
class QuantScheme {
 public:
  // Throws kInvalidScheme unless 2 <= storage_bits <= 8, 1 <= base_T <=
  // 2^(bits-1)-1, alpha >= 1 and the scaled range is non-empty.
  static QuantScheme make(int storage_bits, int base_T, double alpha);

  int storage_bits() const { return storage_bits_; }
  int base_T() const { return base_T_; }
  double alpha() const { return alpha_; }
  int T_s() const { return T_s_; }
  // 2^(bits-1) - 1, the largest magnitude the storage type holds.
  int storage_limit() const { return (1 << (storage_bits_ - 1)) - 1; }

  bool operator==(const QuantScheme&) const = default;

 private:
  QuantScheme(int bits, int base_T, double alpha, int T_s)
      : storage_bits_(bits), base_T_(base_T), alpha_(alpha), T_s_(T_s) {}

  int storage_bits_;
  int base_T_;
  double alpha_;
  int T_s_;
};

inline QuantScheme make_scheme(int storage_bits, int base_T, double alpha) {
  return QuantScheme::make(storage_bits, base_T, alpha);
}

// Activation / weight schemes that keep the F(2,3) transforms inside INT8.
inline QuantScheme winograd_activation_scheme() { return make_scheme(8, 63, 1.0); }
inline QuantScheme winograd_weight_scheme() { return make_scheme(8, 63, 1.5); }
// Full-range INT8 for layers that do not take the Winograd path.
inline QuantScheme plain_int8_scheme() { return make_scheme(8, 127, 1.0); }

std::string to_string(const QuantScheme& scheme);

// round(clip(x, -T_s, T_s)), round-half-away-from-zero.
inline int quantize_value(double x_over_s, int T_s) {
  const double limit = static_cast<double>(T_s);
  const double clipped = x_over_s < -limit ? -limit : (x_over_s > limit ? limit : x_over_s);
  return static_cast<int>(std::round(clipped));
}

class QuantizedTensor {
 public:
  // Throws kRange if any |value| > T_s, kNumeric if scale is not finite and
  // positive.
  QuantizedTensor(TensorI8 values, double scale, QuantScheme scheme);

  const TensorI8& values() const { return values_; }
  const Shape& shape() const { return values_.shape(); }
  double scale() const { return scale_; }
  const QuantScheme& scheme() const { return scheme_; }

 private:
  TensorI8 values_;
  double scale_;
  QuantScheme scheme_;
};

QuantizedTensor quantize(const TensorF32& v, double scale, const QuantScheme& scheme);
TensorF32 dequantize(const QuantizedTensor& q);
// s * round(clip(v / s, -T_s, T_s)); equals dequantize(quantize(v, s)) bit for bit.
TensorF32 fake_quantize(const TensorF32& v, double scale, const QuantScheme& scheme);

inline constexpr double kEpsilonScale = 1e-8;

// max|v| / T_s, or `epsilon` for an all-zero tensor.
double minmax_scale(const TensorF32& v, const QuantScheme& scheme,
                    double epsilon = kEpsilonScale);

}  // namespace winoq
