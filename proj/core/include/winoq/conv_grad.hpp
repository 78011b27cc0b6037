// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "winoq/reference_conv.hpp"

namespace winoq::rsq {

struct ConvGrads {
  TensorF32 grad_input;
  TensorF32 grad_weights;
  std::vector<float> grad_bias;
};

// Analytic gradients of conv1d_f32_direct with respect to its input,
// weights and bias, given dL/d(output).
ConvGrads conv1d_backward(const TensorF32& input, const Conv1DLayer& layer,
                          const TensorF32& upstream);

}  // namespace winoq::rsq
