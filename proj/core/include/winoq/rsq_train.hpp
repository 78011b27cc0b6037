// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "winoq/calibration.hpp"
#include "winoq/toy_model.hpp"

namespace winoq::rsq {

enum class Mode {
  kPtq,       // calibrated scales, no fine-tuning
  kRsqNoMse,  // fine-tuning without the quantization noise loss
  kRsq,       // fine-tuning with beta * noise loss
};

const char* to_string(Mode mode);
Mode parse_mode(const std::string& name);  // "ptq" | "rsq_nomse" | "rsq"

struct RSQConfig {
  double beta = 0.25;
  double lr0 = 0.005;
  std::size_t steps = 300;
  double decay_power = 1.0;
  std::size_t batch = 8;
  std::size_t width = 32;
  std::uint64_t seed = 0;
  Mode mode = Mode::kRsq;
  std::size_t calibration_batches = 4;
  std::size_t heldout_batches = 4;
  std::size_t histogram_bins = kDefaultHistogramBins;

  // Weight of the noise loss actually applied in this mode.
  double effective_beta() const { return mode == Mode::kRsq ? beta : 0.0; }
  void validate() const;
};

// lr0 * (1 - step / steps)^decay_power; kPrecondition outside [0, steps].
double poly_lr(const RSQConfig& cfg, std::size_t step);

struct HistoryEntry {
  std::size_t step = 0;
  double task_loss = 0.0;
  double noise_loss = 0.0;  // unweighted sum over all quantized tensors
  double lr = 0.0;
  bool operator==(const HistoryEntry&) const = default;
};

struct TrainResult {
  ToyModel student;
  std::vector<HistoryEntry> history;
  double final_output_mse = 0.0;  // fake-quant student vs teacher, held-out data
  RSQConfig config;
};

// Scales come from KL calibration on seeded Gaussian batches; PTQ stops
// there. The other modes run plain SGD on task MSE + beta * sum of noise
// losses with straight-through gradients for weights and step sizes.
// Throws kDivergence on a non-finite loss.
TrainResult run_rsq_training(const ToyModel& teacher, const RSQConfig& cfg);

// Named per-tensor step sizes, e.g. "layer0.act", "layer0.wt".
std::map<std::string, double> scales_of(const ToyModel& model);

std::string to_json(const TrainResult& result);

// Seeded Gaussian input batch of shape (batch, in_channels, width).
TensorF32 gaussian_batch(const Shape& shape, std::uint64_t seed);

struct DeployFault {
  std::ptrdiff_t layer = -1;  // -1: no fault
  bool on_weights = true;
  double scale_factor = 1.0;
};

struct LayerDeployment {
  std::size_t index = 0;
  std::string path;  // "int8-winograd", "int8-gemm" or "fp32"
  double max_rel_divergence = 0.0;
  std::size_t worst_channel = 0;
  std::size_t worst_position = 0;
};

struct DeployReport {
  std::vector<LayerDeployment> layers;
  double tolerance = 1e-4;
  bool passed() const;
};

// Quantizes each quantized layer with its learned scales, runs the integer
// operator, and compares against the fake-quant simulation of the same
// layer on `probe`. Relative divergence is max|int - sim| / max|sim| per
// layer. Throws kDeploymentMismatch naming the worst layer and location
// when any layer exceeds `tolerance`.
DeployReport deploy_check(const ToyModel& student, const TensorF32& probe,
                          double tolerance = 1e-4, const DeployFault& fault = {});

std::string to_json(const DeployReport& report);

}  // namespace winoq::rsq
