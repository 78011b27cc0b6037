// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/quantizer.hpp"

#include <cstdlib>
#include <sstream>

namespace winoq {

QuantScheme QuantScheme::make(int storage_bits, int base_T, double alpha) {
  if (storage_bits < 2 || storage_bits > 8) {
    fail(ErrorCode::kInvalidScheme,
         "storage_bits must be in [2, 8], got " + std::to_string(storage_bits));
  }
  const int limit = (1 << (storage_bits - 1)) - 1;
  if (base_T < 1 || base_T > limit) {
    fail(ErrorCode::kInvalidScheme, "base_T " + std::to_string(base_T) +
                                        " outside [1, " + std::to_string(limit) + "]");
  }
  if (!std::isfinite(alpha) || alpha < 1.0) {
    fail(ErrorCode::kInvalidScheme, "alpha must be >= 1");
  }
  // The nudge keeps exact quotients such as 63 / 1.5 from flooring to 41.
  const int T_s = static_cast<int>(std::floor(static_cast<double>(base_T) / alpha + 1e-9));
  if (T_s < 1) fail(ErrorCode::kInvalidScheme, "scaled range floor(T/alpha) is empty");
  return QuantScheme(storage_bits, base_T, alpha, T_s);
}

std::string to_string(const QuantScheme& scheme) {
  std::ostringstream os;
  os << "{bits=" << scheme.storage_bits() << ", T=" << scheme.base_T()
     << ", alpha=" << scheme.alpha() << ", T_s=" << scheme.T_s() << "}";
  return os.str();
}

QuantizedTensor::QuantizedTensor(TensorI8 values, double scale, QuantScheme scheme)
    : values_(std::move(values)), scale_(scale), scheme_(scheme) {
  if (!std::isfinite(scale_) || scale_ <= 0.0) {
    fail(ErrorCode::kNumeric, "quantization scale must be finite and positive");
  }
  for (std::int8_t v : values_.data()) {
    if (std::abs(static_cast<int>(v)) > scheme_.T_s()) {
      fail(ErrorCode::kRange, "value " + std::to_string(v) + " outside [-T_s, T_s] for " +
                                  to_string(scheme_));
    }
  }
}

namespace {

void check_scale(double scale) {
  if (!std::isfinite(scale) || scale <= 0.0) {
    fail(ErrorCode::kPrecondition, "quantization scale must be finite and positive");
  }
}

}  // namespace

QuantizedTensor quantize(const TensorF32& v, double scale, const QuantScheme& scheme) {
  check_scale(scale);
  TensorI8 out(v.shape(), std::int8_t{0});
  auto src = v.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!std::isfinite(src[i])) {
      fail(ErrorCode::kNumeric, "non-finite element at flat index " + std::to_string(i));
    }
    dst[i] = static_cast<std::int8_t>(quantize_value(static_cast<double>(src[i]) / scale,
                                                     scheme.T_s()));
  }
  return QuantizedTensor(std::move(out), scale, scheme);
}

TensorF32 dequantize(const QuantizedTensor& q) {
  TensorF32 out(q.shape(), 0.0f);
  auto src = q.values().data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<float>(q.scale() * static_cast<double>(src[i]));
  }
  return out;
}

TensorF32 fake_quantize(const TensorF32& v, double scale, const QuantScheme& scheme) {
  check_scale(scale);
  TensorF32 out(v.shape(), 0.0f);
  auto src = v.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!std::isfinite(src[i])) {
      fail(ErrorCode::kNumeric, "non-finite element at flat index " + std::to_string(i));
    }
    const int n = quantize_value(static_cast<double>(src[i]) / scale, scheme.T_s());
    dst[i] = static_cast<float>(scale * static_cast<double>(n));
  }
  return out;
}

double minmax_scale(const TensorF32& v, const QuantScheme& scheme, double epsilon) {
  double max_abs = 0.0;
  for (float x : v.data()) max_abs = std::max(max_abs, std::abs(static_cast<double>(x)));
  if (max_abs == 0.0) return epsilon;
  return max_abs / scheme.T_s();
}

}  // namespace winoq
