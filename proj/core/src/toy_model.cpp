// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/toy_model.hpp"

#include <cmath>
#include <random>

#include "winoq/winograd.hpp"

namespace winoq::rsq {

ToyModel make_toy_teacher(const ToyTopology& topology, std::uint64_t seed) {
  if (topology.layers.empty()) fail(ErrorCode::kPrecondition, "topology has no layers");
  std::mt19937_64 rng(seed);
  // Student-t(3) weights: a few large taps make the weight range calibration
  // matter.
  std::student_t_distribution<double> heavy(3.0);
  std::normal_distribution<double> bias_dist(0.0, 0.05);

  ToyModel model;
  model.in_channels = topology.in_channels;
  std::size_t c_in = topology.in_channels;
  for (std::size_t l = 0; l < topology.layers.size(); ++l) {
    const LayerSpec& spec = topology.layers[l];
    const double gain = 1.0 / std::sqrt(static_cast<double>(c_in * spec.k));
    TensorF32 w(Shape{spec.c_out, c_in, spec.k}, 0.0f);
    for (float& v : w.data()) v = static_cast<float>(gain * heavy(rng) / std::sqrt(3.0));
    std::vector<float> bias(spec.c_out);
    for (float& b : bias) b = static_cast<float>(bias_dist(rng));

    ToyLayer layer;
    layer.conv = Conv1DLayer{std::move(w), std::move(bias), 1, same_padding(spec.k)};
    const bool last = l + 1 == topology.layers.size();
    layer.relu_after = !last;
    layer.quantized = !last;
    model.layers.push_back(std::move(layer));
    c_in = spec.c_out;
  }
  return model;
}

void validate_model(const ToyModel& model) {
  if (model.layers.empty()) fail(ErrorCode::kPrecondition, "model has no layers");
  std::size_t c = model.in_channels;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const ToyLayer& layer = model.layers[l];
    if (layer.conv.c_in() != c) {
      fail(ErrorCode::kShapeMismatch, "layer " + std::to_string(l) + " expects " +
                                          std::to_string(layer.conv.c_in()) +
                                          " input channels, chain provides " + std::to_string(c));
    }
    if (layer.conv.stride != 1) {
      fail(ErrorCode::kUnsupportedPlan, "toy layers must have stride 1");
    }
    if (layer.quantized && !check_overflow(layer.act.scheme, layer.wt.scheme).fits()) {
      fail(ErrorCode::kUnsafeScheme, "layer " + std::to_string(l) +
                                         " schemes overflow the INT8 Winograd transforms");
    }
    c = layer.conv.c_out();
  }
}

ForwardTrace forward(const ToyModel& model, const TensorF32& x, bool simulate_quant) {
  ForwardTrace trace;
  trace.layers.reserve(model.layers.size());
  const TensorF32* current = &x;
  for (const ToyLayer& layer : model.layers) {
    LayerTrace t;
    t.input = *current;
    const bool fq = simulate_quant && layer.quantized;
    t.input_q = fq ? fq_forward(t.input, layer.act) : t.input;
    t.weights_q = fq ? fq_forward(layer.conv.weights, layer.wt) : layer.conv.weights;
    Conv1DLayer conv{t.weights_q, layer.conv.bias, layer.conv.stride, layer.conv.padding};
    t.pre_act = conv1d_f32_direct(t.input_q, conv);
    t.output = t.pre_act;
    if (layer.relu_after) {
      for (float& v : t.output.data()) v = v > 0.0f ? v : 0.0f;
    }
    trace.layers.push_back(std::move(t));
    current = &trace.layers.back().output;
  }
  return trace;
}

}  // namespace winoq::rsq
