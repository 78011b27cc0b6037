// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/conv_grad.hpp"

#include "conv_checks.hpp"

namespace winoq::rsq {

ConvGrads conv1d_backward(const TensorF32& input, const Conv1DLayer& layer,
                          const TensorF32& upstream) {
  const Shape& in = input.shape();
  const std::size_t k = layer.kernel();
  const std::size_t c_in = layer.c_in();
  const std::size_t c_out = layer.c_out();
  const std::size_t stride = layer.stride;
  detail::check_channels(in, c_in);
  const std::size_t out_w = conv_output_width(in.width, k, stride, layer.padding);
  if (upstream.shape() != Shape{in.batch, c_out, out_w}) {
    fail(ErrorCode::kShapeMismatch, "upstream " + to_string(upstream.shape()) +
                                        " does not match conv output " +
                                        to_string(Shape{in.batch, c_out, out_w}));
  }

  const std::size_t left = layer.padding.left;
  const std::size_t padded_w = in.width + left + layer.padding.right;
  std::vector<double> gw(c_out * c_in * k, 0.0);
  std::vector<double> gb(c_out, 0.0);
  TensorF32 grad_input(in, 0.0f);

  std::vector<double> gx(padded_w);
  for (std::size_t b = 0; b < in.batch; ++b) {
    for (std::size_t co = 0; co < c_out; ++co) {
      for (float u : upstream.row(b, co)) gb[co] += u;
    }
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      const auto x = detail::padded_row(input.row(b, ci), layer.padding);
      std::fill(gx.begin(), gx.end(), 0.0);
      for (std::size_t co = 0; co < c_out; ++co) {
        auto up = upstream.row(b, co);
        auto w = layer.weights.row(co, ci);
        double* gwr = &gw[(co * c_in + ci) * k];
        for (std::size_t i = 0; i < out_w; ++i) {
          const double u = up[i];
          if (u == 0.0) continue;
          const std::size_t base = i * stride;
          for (std::size_t j = 0; j < k; ++j) {
            gwr[j] += u * x[base + j];
            gx[base + j] += u * w[j];
          }
        }
      }
      auto dst = grad_input.row(b, ci);
      for (std::size_t p = 0; p < in.width; ++p) dst[p] = static_cast<float>(gx[p + left]);
    }
  }

  ConvGrads out{std::move(grad_input), TensorF32(layer.weights.shape(), 0.0f),
                std::vector<float>(c_out)};
  auto gwd = out.grad_weights.data();
  for (std::size_t i = 0; i < gw.size(); ++i) gwd[i] = static_cast<float>(gw[i]);
  for (std::size_t co = 0; co < c_out; ++co) out.grad_bias[co] = static_cast<float>(gb[co]);
  return out;
}

}  // namespace winoq::rsq
