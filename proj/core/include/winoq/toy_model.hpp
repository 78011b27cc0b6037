// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "winoq/fake_quant.hpp"
#include "winoq/reference_conv.hpp"

namespace winoq::rsq {

struct ToyLayer {
  Conv1DLayer conv;
  bool relu_after = true;
  bool quantized = true;
  FakeQuantParam act{1.0, winograd_activation_scheme()};  // on the layer input
  FakeQuantParam wt{1.0, winograd_weight_scheme()};
};

// A chain of stride-1 Conv1D layers with ReLU in between. The last layer is
// the classifier and stays in FP32.
struct ToyModel {
  std::size_t in_channels = 1;
  std::vector<ToyLayer> layers;

  std::size_t out_channels() const { return layers.back().conv.c_out(); }
};

struct LayerSpec {
  std::size_t c_out = 8;
  std::size_t k = 3;
};

struct ToyTopology {
  std::size_t in_channels = 4;
  std::vector<LayerSpec> layers{{16, 15}, {16, 8}, {4, 3}};
};

// Random FP32 teacher: "same"-padded layers, heavy-tailed weights scaled by
// 1/sqrt(c_in * k). Every layer but the last is marked for quantization.
ToyModel make_toy_teacher(const ToyTopology& topology, std::uint64_t seed);

// Throws kShapeMismatch for broken channel chains and kUnsafeScheme for
// quantized layers whose schemes overflow the INT8 Winograd transforms.
void validate_model(const ToyModel& model);

// Per-layer intermediates kept for the backward pass.
struct LayerTrace {
  TensorF32 input;      // layer input before activation fake-quant
  TensorF32 input_q;    // fed to the convolution
  TensorF32 weights_q;  // weights fed to the convolution
  TensorF32 pre_act;    // convolution output
  TensorF32 output;     // after ReLU (or pre_act for the last layer)
};

struct ForwardTrace {
  std::vector<LayerTrace> layers;
  const TensorF32& output() const { return layers.back().output; }
};

// `simulate_quant` false runs plain FP32; true applies fake quantization to
// the input and weights of every quantized layer.
ForwardTrace forward(const ToyModel& model, const TensorF32& x, bool simulate_quant);

}  // namespace winoq::rsq
