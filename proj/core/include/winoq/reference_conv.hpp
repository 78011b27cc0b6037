// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "winoq/quantizer.hpp"
#include "winoq/tensor.hpp"

namespace winoq {

struct Padding {
  std::size_t left = 0;
  std::size_t right = 0;
  bool operator==(const Padding&) const = default;
};

// "Same" padding for stride 1: (k-1)/2 on the left, the rest on the right.
inline Padding same_padding(std::size_t k) { return Padding{(k - 1) / 2, k - 1 - (k - 1) / 2}; }

// Cross-correlation layer; weights are (c_out, c_in, k).
struct Conv1DLayer {
  TensorF32 weights;
  std::vector<float> bias;  // empty means zeros
  std::size_t stride = 1;
  Padding padding{};

  std::size_t c_out() const { return weights.shape().batch; }
  std::size_t c_in() const { return weights.shape().channels; }
  std::size_t kernel() const { return weights.shape().width; }
};

struct QuantizedConv1D {
  QuantizedTensor weights;
  std::vector<float> bias;
  std::size_t stride = 1;
  Padding padding{};

  std::size_t c_out() const { return weights.shape().batch; }
  std::size_t c_in() const { return weights.shape().channels; }
  std::size_t kernel() const { return weights.shape().width; }
};

struct IntConvResult {
  TensorI32 raw;
  TensorF32 dequantized;
};

// (width + left + right - k) / stride + 1; throws kShapeMismatch when the
// padded input is shorter than the kernel.
std::size_t conv_output_width(std::size_t width, std::size_t k, std::size_t stride,
                              const Padding& padding);

// out[b,co,i] = bias[co] + sum_{ci,j} in[b,ci,i*stride+j-left] * w[co,ci,j].
TensorF32 conv1d_f32_direct(const TensorF32& input, const Conv1DLayer& layer);

// Same result through the F(2,3) split plan in real arithmetic. Requires
// k >= 3 and stride 1 (kUnsupportedPlan otherwise).
TensorF32 conv1d_f32_winograd(const TensorF32& input, const Conv1DLayer& layer);

// im2col + int8 GEMM with int32 accumulation. raw = sum q_in * q_w;
// dequantized = raw * s_d * s_g + bias.
IntConvResult conv1d_int8_gemm(const QuantizedTensor& input, const QuantizedConv1D& layer,
                               int threads = 1);

}  // namespace winoq
