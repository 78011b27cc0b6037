// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/rsq_train.hpp"

#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"
#include "winoq/conv_grad.hpp"
#include "winoq/winograd.hpp"

namespace winoq::rsq {
namespace {

// Independent streams derived from the experiment seed; every mode sees the
// same teacher data for a given seed.
enum Stream : std::uint64_t { kCalibration = 1, kTrain = 2, kHeldout = 3 };

std::uint64_t stream_seed(std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(stream), index};
  std::uint64_t out = 0;
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  out = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out;
}

double mse(const TensorF32& a, const TensorF32& b) {
  auto x = a.data();
  auto y = b.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x[i]) - y[i];
    acc += d * d;
  }
  return acc / static_cast<double>(x.size());
}

// Concatenates tensors along the batch axis.
TensorF32 stack(const std::vector<TensorF32>& parts) {
  Shape s = parts.front().shape();
  s.batch = 0;
  for (const auto& p : parts) s.batch += p.shape().batch;
  std::vector<float> data;
  data.reserve(s.numel());
  for (const auto& p : parts) data.insert(data.end(), p.data().begin(), p.data().end());
  return TensorF32(s, std::move(data));
}

void calibrate_scales(ToyModel& student, const RSQConfig& cfg) {
  std::vector<std::vector<TensorF32>> inputs(student.layers.size());
  for (std::size_t n = 0; n < cfg.calibration_batches; ++n) {
    const TensorF32 x = gaussian_batch(Shape{cfg.batch, student.in_channels, cfg.width},
                                       stream_seed(cfg.seed, kCalibration, n));
    const ForwardTrace trace = forward(student, x, /*simulate_quant=*/false);
    for (std::size_t l = 0; l < student.layers.size(); ++l) {
      inputs[l].push_back(trace.layers[l].input);
    }
  }
  for (std::size_t l = 0; l < student.layers.size(); ++l) {
    ToyLayer& layer = student.layers[l];
    if (!layer.quantized) continue;
    const TensorF32 acts = stack(inputs[l]);
    layer.act.s = kl_calibrate(build_histogram(acts, cfg.histogram_bins), layer.act.scheme).scale;
    layer.wt.s = kl_calibrate(build_histogram(layer.conv.weights, cfg.histogram_bins),
                              layer.wt.scheme)
                     .scale;
    layer.act.clamp();
    layer.wt.clamp();
  }
}

void add_scaled(TensorF32& dst, const TensorF32& src, float k) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += k * s[i];
}

struct StepLosses {
  double task = 0.0;
  double noise = 0.0;
};

// One SGD step on a batch. Returns the losses measured before the update.
StepLosses sgd_step(ToyModel& student, const ToyModel& teacher, const TensorF32& x, double beta,
                    double lr) {
  const TensorF32 target = forward(teacher, x, false).output();
  const ForwardTrace trace = forward(student, x, true);
  const TensorF32& out = trace.output();

  StepLosses losses;
  losses.task = mse(out, target);
  for (std::size_t l = 0; l < student.layers.size(); ++l) {
    const ToyLayer& layer = student.layers[l];
    if (!layer.quantized) continue;
    losses.noise += noise_loss(trace.layers[l].input, layer.act);
    losses.noise += noise_loss(layer.conv.weights, layer.wt);
  }
  const double total = losses.task + beta * losses.noise;
  if (!std::isfinite(total)) return losses;

  TensorF32 up(out.shape(), 0.0f);
  {
    auto u = up.data();
    auto o = out.data();
    auto t = target.data();
    const double k = 2.0 / static_cast<double>(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] = static_cast<float>(k * (static_cast<double>(o[i]) - t[i]));
    }
  }

  for (std::size_t l = student.layers.size(); l-- > 0;) {
    ToyLayer& layer = student.layers[l];
    const LayerTrace& t = trace.layers[l];
    if (layer.relu_after) {
      auto u = up.data();
      auto z = t.pre_act.data();
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(z[i] > 0.0f)) u[i] = 0.0f;
      }
    }
    const Conv1DLayer conv{t.weights_q, layer.conv.bias, layer.conv.stride, layer.conv.padding};
    ConvGrads g = conv1d_backward(t.input_q, conv, up);

    TensorF32 grad_w = std::move(g.grad_weights);
    TensorF32 grad_x = std::move(g.grad_input);
    double grad_sw = 0.0;
    double grad_sa = 0.0;
    if (layer.quantized) {
      TensorGrads wq = fq_backward(layer.conv.weights, layer.wt, grad_w);
      TensorGrads xq = fq_backward(t.input, layer.act, grad_x);
      grad_w = std::move(wq.grad_v);
      grad_x = std::move(xq.grad_v);
      grad_sw = wq.grad_s;
      grad_sa = xq.grad_s;
      if (beta > 0.0) {
        const TensorGrads nw = noise_grads(layer.conv.weights, layer.wt);
        const TensorGrads nx = noise_grads(t.input, layer.act);
        add_scaled(grad_w, nw.grad_v, static_cast<float>(beta));
        add_scaled(grad_x, nx.grad_v, static_cast<float>(beta));
        grad_sw += beta * nw.grad_s;
        grad_sa += beta * nx.grad_s;
      }
    }

    add_scaled(layer.conv.weights, grad_w, static_cast<float>(-lr));
    for (std::size_t co = 0; co < layer.conv.bias.size(); ++co) {
      layer.conv.bias[co] -= static_cast<float>(lr * g.grad_bias[co]);
    }
    if (layer.quantized) {
      layer.wt.s -= lr * grad_sw;
      layer.act.s -= lr * grad_sa;
      layer.wt.clamp();
      layer.act.clamp();
    }
    up = std::move(grad_x);
  }
  return losses;
}

}  // namespace

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::kPtq: return "ptq";
    case Mode::kRsqNoMse: return "rsq_nomse";
    case Mode::kRsq: return "rsq";
  }
  return "unknown";
}

Mode parse_mode(const std::string& name) {
  if (name == "ptq") return Mode::kPtq;
  if (name == "rsq_nomse") return Mode::kRsqNoMse;
  if (name == "rsq") return Mode::kRsq;
  fail(ErrorCode::kPrecondition, "unknown training mode '" + name + "'");
}

void RSQConfig::validate() const {
  if (!(beta >= 0.0)) fail(ErrorCode::kPrecondition, "beta must be >= 0");
  if (!(lr0 > 0.0)) fail(ErrorCode::kPrecondition, "lr0 must be > 0");
  if (batch == 0 || width == 0) fail(ErrorCode::kPrecondition, "batch and width must be >= 1");
  if (calibration_batches == 0 || heldout_batches == 0) {
    fail(ErrorCode::kPrecondition, "need at least one calibration and one held-out batch");
  }
}

double poly_lr(const RSQConfig& cfg, std::size_t step) {
  if (step > cfg.steps) fail(ErrorCode::kPrecondition, "step beyond schedule");
  if (cfg.steps == 0) return cfg.lr0;
  const double frac = 1.0 - static_cast<double>(step) / static_cast<double>(cfg.steps);
  return cfg.lr0 * std::pow(frac, cfg.decay_power);
}

TensorF32 gaussian_batch(const Shape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> dist(0.0f, 1.0f);
  TensorF32 x(shape, 0.0f);
  for (float& v : x.data()) v = dist(rng);
  return x;
}

TrainResult run_rsq_training(const ToyModel& teacher, const RSQConfig& cfg) {
  cfg.validate();
  validate_model(teacher);

  TrainResult result;
  result.config = cfg;
  result.student = teacher;
  ToyModel& student = result.student;
  calibrate_scales(student, cfg);

  const double beta = cfg.effective_beta();
  const std::size_t steps = cfg.mode == Mode::kPtq ? 0 : cfg.steps;
  for (std::size_t step = 0; step < steps; ++step) {
    const double lr = poly_lr(cfg, step);
    const TensorF32 x = gaussian_batch(Shape{cfg.batch, student.in_channels, cfg.width},
                                       stream_seed(cfg.seed, kTrain, step));
    const StepLosses losses = sgd_step(student, teacher, x, beta, lr);
    if (!std::isfinite(losses.task) || !std::isfinite(losses.noise)) {
      std::ostringstream os;
      os << "non-finite loss at step " << step << " (task " << losses.task << ", noise "
         << losses.noise << ", lr " << lr << ", mode " << to_string(cfg.mode) << ", seed "
         << cfg.seed << ")";
      fail(ErrorCode::kDivergence, os.str());
    }
    result.history.push_back(HistoryEntry{step, losses.task, losses.noise, lr});
  }

  double acc = 0.0;
  for (std::size_t n = 0; n < cfg.heldout_batches; ++n) {
    const TensorF32 x = gaussian_batch(Shape{cfg.batch, student.in_channels, cfg.width},
                                       stream_seed(cfg.seed, kHeldout, n));
    acc += mse(forward(student, x, true).output(), forward(teacher, x, false).output());
  }
  result.final_output_mse = acc / static_cast<double>(cfg.heldout_batches);
  return result;
}

std::map<std::string, double> scales_of(const ToyModel& model) {
  std::map<std::string, double> out;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    if (!model.layers[l].quantized) continue;
    const std::string name = "layer" + std::to_string(l);
    out[name + ".act"] = model.layers[l].act.s;
    out[name + ".wt"] = model.layers[l].wt.s;
  }
  return out;
}

std::string to_json(const TrainResult& result) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& h : result.history) {
    history.push_back(
        {{"step", h.step}, {"task_loss", h.task_loss}, {"noise_loss", h.noise_loss}, {"lr", h.lr}});
  }
  nlohmann::json scales = nlohmann::json::object();
  for (const auto& [name, s] : scales_of(result.student)) scales[name] = s;
  nlohmann::json j = {
      {"mode", to_string(result.config.mode)},
      {"seed", result.config.seed},
      {"steps", result.config.mode == Mode::kPtq ? 0 : result.config.steps},
      {"beta", result.config.effective_beta()},
      {"final_output_mse", result.final_output_mse},
      {"scales", scales},
      {"history", history},
  };
  return j.dump();
}

bool DeployReport::passed() const {
  for (const auto& l : layers) {
    if (!(l.max_rel_divergence <= tolerance)) return false;
  }
  return true;
}

DeployReport deploy_check(const ToyModel& student, const TensorF32& probe, double tolerance,
                          const DeployFault& fault) {
  validate_model(student);
  DeployReport report;
  report.tolerance = tolerance;
  const ForwardTrace sim = forward(student, probe, true);

  for (std::size_t l = 0; l < student.layers.size(); ++l) {
    const ToyLayer& layer = student.layers[l];
    const LayerTrace& t = sim.layers[l];
    LayerDeployment d;
    d.index = l;
    TensorF32 deployed;
    if (layer.quantized) {
      double s_act = layer.act.s;
      double s_wt = layer.wt.s;
      if (fault.layer == static_cast<std::ptrdiff_t>(l)) {
        (fault.on_weights ? s_wt : s_act) *= fault.scale_factor;
      }
      const QuantizedTensor xq = quantize(t.input, s_act, layer.act.scheme);
      const QuantizedConv1D conv{quantize(layer.conv.weights, s_wt, layer.wt.scheme),
                                 layer.conv.bias, layer.conv.stride, layer.conv.padding};
      const Conv1DPlan plan =
          plan_conv1d(layer.conv.kernel(), layer.conv.stride, layer.act.scheme, layer.wt.scheme);
      if (plan.path == ConvPath::kWinograd) {
        d.path = "int8-winograd";
        deployed = conv1d_int8_winograd(xq, conv, plan).dequantized;
      } else {
        d.path = "int8-gemm";
        deployed = conv1d_int8_gemm(xq, conv).dequantized;
      }
    } else if (layer.conv.kernel() >= 3 && layer.conv.stride == 1) {
      d.path = "fp32";
      deployed = conv1d_f32_winograd(t.input, layer.conv);
    } else {
      d.path = "fp32";
      deployed = conv1d_f32_direct(t.input, layer.conv);
    }

    const auto ref = t.pre_act.data();
    const auto got = deployed.data();
    double ref_max = 0.0;
    for (float v : ref) ref_max = std::max(ref_max, std::abs(static_cast<double>(v)));
    double worst = 0.0;
    std::size_t worst_i = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double diff = std::abs(static_cast<double>(got[i]) - ref[i]);
      if (diff > worst) {
        worst = diff;
        worst_i = i;
      }
    }
    const Shape s = t.pre_act.shape();
    d.max_rel_divergence = worst / std::max(ref_max, 1e-30);
    d.worst_channel = (worst_i / s.width) % s.channels;
    d.worst_position = worst_i % s.width;
    report.layers.push_back(d);
  }

  for (const auto& d : report.layers) {
    if (!(d.max_rel_divergence <= tolerance)) {
      std::ostringstream os;
      os << "layer " << d.index << " (" << d.path << ") diverges from the fake-quant simulation by "
         << d.max_rel_divergence << " relative at channel " << d.worst_channel << ", position "
         << d.worst_position << " (tolerance " << tolerance << ")";
      fail(ErrorCode::kDeploymentMismatch, os.str());
    }
  }
  return report;
}

std::string to_json(const DeployReport& report) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& d : report.layers) {
    layers.push_back({{"layer", d.index},
                      {"path", d.path},
                      {"max_rel_divergence", d.max_rel_divergence},
                      {"worst_channel", d.worst_channel},
                      {"worst_position", d.worst_position}});
  }
  return nlohmann::json{{"tolerance", report.tolerance}, {"passed", report.passed()},
                        {"layers", layers}}
      .dump();
}

}  // namespace winoq::rsq
