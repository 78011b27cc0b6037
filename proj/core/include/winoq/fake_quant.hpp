// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include "winoq/quantizer.hpp"

namespace winoq::rsq {

inline constexpr double kMinScale = 1e-8;

// Learnable step size s for one tensor.
struct FakeQuantParam {
  double s = 1.0;
  QuantScheme scheme = winograd_activation_scheme();

  int T_s() const { return scheme.T_s(); }
  void clamp() {
    if (!(s > kMinScale)) s = kMinScale;
  }
};

enum class ClipBranch { kBelow, kInside, kAbove };

template <std::floating_point R>
ClipBranch clip_branch(R v, R s, int T_s) {
  const R r = v / s;
  if (r < -static_cast<R>(T_s)) return ClipBranch::kBelow;
  if (r > static_cast<R>(T_s)) return ClipBranch::kAbove;
  return ClipBranch::kInside;
}

// Q(v) = s * round(clip(v / s, -T_s, T_s))
template <std::floating_point R>
R fq_value(R v, R s, int T_s) {
  return s * static_cast<R>(quantize_value(static_cast<double>(v / s), T_s));
}

// Straight-through dQ/dv: 1 inside the clip range, 0 outside.
template <std::floating_point R>
R dq_dv(R v, R s, int T_s) {
  return clip_branch(v, s, T_s) == ClipBranch::kInside ? R{1} : R{0};
}

// dQ/ds: -T_s below, -v/s + round(v/s) inside, T_s above.
template <std::floating_point R>
R dq_ds(R v, R s, int T_s) {
  switch (clip_branch(v, s, T_s)) {
    case ClipBranch::kBelow: return -static_cast<R>(T_s);
    case ClipBranch::kAbove: return static_cast<R>(T_s);
    case ClipBranch::kInside: break;
  }
  const R r = v / s;
  return -r + static_cast<R>(std::round(r));
}

template <std::floating_point R>
struct GradPair {
  std::vector<R> grad_v;
  R grad_s = 0;
};

// grad_v_i = up_i * dQ/dv_i, grad_s = sum_i up_i * dQ/ds_i.
template <std::floating_point R>
GradPair<R> fq_backward(std::span<const R> v, R s, int T_s, std::span<const R> upstream) {
  if (v.size() != upstream.size()) {
    fail(ErrorCode::kShapeMismatch, "upstream gradient does not match tensor size");
  }
  GradPair<R> g;
  g.grad_v.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    g.grad_v[i] = upstream[i] * dq_dv(v[i], s, T_s);
    g.grad_s += upstream[i] * dq_ds(v[i], s, T_s);
  }
  return g;
}

// L_q = (1/N) sum_i (Q(v_i) - v_i)^2
template <std::floating_point R>
R noise_loss(std::span<const R> v, R s, int T_s) {
  if (v.empty()) fail(ErrorCode::kPrecondition, "noise loss of an empty tensor");
  R acc = 0;
  for (R x : v) {
    const R e = fq_value(x, s, T_s) - x;
    acc += e * e;
  }
  return acc / static_cast<R>(v.size());
}

// dL_q/dv_i = (2/N)(Q - v)(dQ/dv - 1), dL_q/ds = (2/N) sum_i (Q - v) dQ/ds.
template <std::floating_point R>
GradPair<R> noise_grads(std::span<const R> v, R s, int T_s) {
  if (v.empty()) fail(ErrorCode::kPrecondition, "noise loss of an empty tensor");
  const R k = R{2} / static_cast<R>(v.size());
  GradPair<R> g;
  g.grad_v.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const R e = fq_value(v[i], s, T_s) - v[i];
    g.grad_v[i] = k * e * (dq_dv(v[i], s, T_s) - R{1});
    g.grad_s += k * e * dq_ds(v[i], s, T_s);
  }
  return g;
}

// Tensor-level wrappers. Elements are promoted to double, matching
// winoq::fake_quantize element for element.
struct TensorGrads {
  TensorF32 grad_v;
  double grad_s = 0.0;
};

TensorF32 fq_forward(const TensorF32& v, const FakeQuantParam& p);
TensorGrads fq_backward(const TensorF32& v, const FakeQuantParam& p, const TensorF32& upstream);
double noise_loss(const TensorF32& v, const FakeQuantParam& p);
TensorGrads noise_grads(const TensorF32& v, const FakeQuantParam& p);

}  // namespace winoq::rsq
