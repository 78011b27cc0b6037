// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/reference_conv.hpp"

#include <limits>

#include "conv_checks.hpp"
#include "int_gemm.hpp"
#include "winoq/winograd.hpp"

namespace winoq {

std::size_t conv_output_width(std::size_t width, std::size_t k, std::size_t stride,
                              const Padding& padding) {
  detail::check_stride(stride);
  const std::size_t padded = width + padding.left + padding.right;
  if (k == 0 || padded < k) {
    fail(ErrorCode::kShapeMismatch, "padded width " + std::to_string(padded) +
                                        " shorter than kernel " + std::to_string(k));
  }
  return (padded - k) / stride + 1;
}

TensorF32 conv1d_f32_direct(const TensorF32& input, const Conv1DLayer& layer) {
  const Shape& in = input.shape();
  const std::size_t k = layer.kernel();
  detail::check_channels(in, layer.c_in());
  const auto bias = detail::bias_or_zeros(layer.bias, layer.c_out());
  const std::size_t out_w = conv_output_width(in.width, k, layer.stride, layer.padding);

  TensorF32 out(Shape{in.batch, layer.c_out(), out_w}, 0.0f);
  for (std::size_t b = 0; b < in.batch; ++b) {
    std::vector<std::vector<float>> rows;
    rows.reserve(in.channels);
    for (std::size_t ci = 0; ci < in.channels; ++ci) {
      rows.push_back(detail::padded_row(input.row(b, ci), layer.padding));
    }
    for (std::size_t co = 0; co < layer.c_out(); ++co) {
      for (std::size_t i = 0; i < out_w; ++i) {
        double acc = bias[co];
        for (std::size_t ci = 0; ci < in.channels; ++ci) {
          auto w = layer.weights.row(co, ci);
          const float* x = rows[ci].data() + i * layer.stride;
          for (std::size_t j = 0; j < k; ++j) acc += static_cast<double>(x[j]) * w[j];
        }
        out.at(b, co, i) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

TensorF32 conv1d_f32_winograd(const TensorF32& input, const Conv1DLayer& layer) {
  const std::size_t k = layer.kernel();
  if (k < 3 || layer.stride != 1) {
    fail(ErrorCode::kUnsupportedPlan, "real Winograd path needs k >= 3 and stride 1 (k=" +
                                          std::to_string(k) + ", stride=" +
                                          std::to_string(layer.stride) + ")");
  }
  const Shape& in = input.shape();
  detail::check_channels(in, layer.c_in());
  const auto bias = detail::bias_or_zeros(layer.bias, layer.c_out());
  const std::size_t out_w = conv_output_width(in.width, k, 1, layer.padding);
  const Conv1DPlan plan = plan_conv1d(k, 1);
  const WinogradBasis& basis = WinogradBasis::standard();
  const std::size_t c_in = layer.c_in();
  const std::size_t groups = plan.wino_groups.size();

  // Transformed weights, laid out [co][ci][group][4].
  std::vector<float> U(layer.c_out() * c_in * groups * 4);
  for (std::size_t co = 0; co < layer.c_out(); ++co) {
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      auto w = layer.weights.row(co, ci);
      for (std::size_t g = 0; g < groups; ++g) {
        const float* taps = w.data() + plan.wino_groups[g];
        for (int r = 0; r < 4; ++r) {
          float acc = 0.0f;
          for (int c = 0; c < 3; ++c) acc += static_cast<float>(basis.G2[r][c]) * taps[c];
          U[((co * c_in + ci) * groups + g) * 4 + r] = acc;
        }
      }
    }
  }

  TensorF32 out(Shape{in.batch, layer.c_out(), out_w}, 0.0f);
  const std::size_t tiles = out_w / 2;
  for (std::size_t b = 0; b < in.batch; ++b) {
    std::vector<std::vector<float>> rows;
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      rows.push_back(detail::padded_row(input.row(b, ci), layer.padding));
    }
    for (std::size_t co = 0; co < layer.c_out(); ++co) {
      for (std::size_t t = 0; t < tiles; ++t) {
        std::array<float, 4> m{};
        double rem0 = 0.0;
        double rem1 = 0.0;
        for (std::size_t ci = 0; ci < c_in; ++ci) {
          const float* x = rows[ci].data() + 2 * t;
          for (std::size_t g = 0; g < groups; ++g) {
            const float* d = x + plan.wino_groups[g];
            const float* u = &U[((co * c_in + ci) * groups + g) * 4];
            for (int r = 0; r < 4; ++r) {
              float v = 0.0f;
              for (int c = 0; c < 4; ++c) v += static_cast<float>(basis.BT[r][c]) * d[c];
              m[r] += u[r] * v;
            }
          }
          auto w = layer.weights.row(co, ci);
          for (std::size_t j = 0; j < plan.remainder.len; ++j) {
            const std::size_t tap = plan.remainder.offset + j;
            rem0 += static_cast<double>(w[tap]) * x[tap];
            rem1 += static_cast<double>(w[tap]) * x[tap + 1];
          }
        }
        float y0 = 0.0f;
        float y1 = 0.0f;
        for (int c = 0; c < 4; ++c) {
          y0 += static_cast<float>(basis.AT[0][c]) * m[c];
          y1 += static_cast<float>(basis.AT[1][c]) * m[c];
        }
        out.at(b, co, 2 * t) = bias[co] + y0 / static_cast<float>(basis.output_rescale_den) +
                               static_cast<float>(rem0);
        out.at(b, co, 2 * t + 1) = bias[co] +
                                   y1 / static_cast<float>(basis.output_rescale_den) +
                                   static_cast<float>(rem1);
      }
      if (out_w % 2 == 1) {
        const std::size_t i = out_w - 1;
        double acc = bias[co];
        for (std::size_t ci = 0; ci < c_in; ++ci) {
          auto w = layer.weights.row(co, ci);
          for (std::size_t j = 0; j < k; ++j) acc += static_cast<double>(w[j]) * rows[ci][i + j];
        }
        out.at(b, co, i) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

IntConvResult conv1d_int8_gemm(const QuantizedTensor& input, const QuantizedConv1D& layer,
                               int threads) {
  const Shape& in = input.shape();
  const std::size_t k = layer.kernel();
  const std::size_t c_in = layer.c_in();
  const std::size_t c_out = layer.c_out();
  detail::check_channels(in, c_in);
  const auto bias = detail::bias_or_zeros(layer.bias, c_out);
  const std::size_t out_w = conv_output_width(in.width, k, layer.stride, layer.padding);

  const double bound = static_cast<double>(c_in) * static_cast<double>(k) *
                       input.scheme().T_s() * layer.weights.scheme().T_s();
  if (bound >= static_cast<double>(std::numeric_limits<std::int32_t>::max())) {
    fail(ErrorCode::kOverflowRisk, "int32 accumulator head-room exceeded: c_in*k*T_act*T_wt = " +
                                       std::to_string(static_cast<long long>(bound)));
  }

  TensorI32 raw(Shape{in.batch, c_out, out_w}, 0);
  TensorF32 deq(Shape{in.batch, c_out, out_w}, 0.0f);
  const std::size_t K = c_in * k;
  std::vector<std::int8_t> col(K * out_w);
  const std::int8_t* A = layer.weights.values().data().data();
  const double rescale = input.scale() * layer.weights.scale();

  for (std::size_t b = 0; b < in.batch; ++b) {
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      const auto row = detail::padded_row(input.values().row(b, ci), layer.padding);
      for (std::size_t i = 0; i < out_w; ++i) {
        std::int8_t* dst = &col[i * K + ci * k];
        for (std::size_t j = 0; j < k; ++j) dst[j] = row[i * layer.stride + j];
      }
    }
    std::int32_t* C = raw.data().data() + raw.offset(b, 0, 0);
    detail::gemm_s8s8s32(c_out, out_w, K, A, col.data(), C, threads);
    for (std::size_t co = 0; co < c_out; ++co) {
      for (std::size_t i = 0; i < out_w; ++i) {
        deq.at(b, co, i) =
            static_cast<float>(static_cast<double>(raw.at(b, co, i)) * rescale + bias[co]);
      }
    }
  }
  return {std::move(raw), std::move(deq)};
}

}  // namespace winoq
