// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/fake_quant.hpp"

namespace winoq::rsq {
namespace {

std::vector<double> widen(std::span<const float> v) { return {v.begin(), v.end()}; }

TensorF32 narrow(const Shape& shape, const std::vector<double>& v) {
  std::vector<float> out(v.begin(), v.end());
  return TensorF32(shape, std::move(out));
}

}  // namespace

TensorF32 fq_forward(const TensorF32& v, const FakeQuantParam& p) {
  return fake_quantize(v, p.s, p.scheme);
}

TensorGrads fq_backward(const TensorF32& v, const FakeQuantParam& p, const TensorF32& upstream) {
  if (v.shape() != upstream.shape()) {
    fail(ErrorCode::kShapeMismatch, "upstream " + to_string(upstream.shape()) +
                                        " does not match tensor " + to_string(v.shape()));
  }
  const auto vd = widen(v.data());
  const auto ud = widen(upstream.data());
  auto g = fq_backward<double>(vd, p.s, p.T_s(), ud);
  return {narrow(v.shape(), g.grad_v), g.grad_s};
}

double noise_loss(const TensorF32& v, const FakeQuantParam& p) {
  const auto vd = widen(v.data());
  return noise_loss<double>(vd, p.s, p.T_s());
}

TensorGrads noise_grads(const TensorF32& v, const FakeQuantParam& p) {
  const auto vd = widen(v.data());
  auto g = noise_grads<double>(vd, p.s, p.T_s());
  return {narrow(v.shape(), g.grad_v), g.grad_s};
}

}  // namespace winoq::rsq
