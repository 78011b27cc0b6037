// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/reference_conv.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"

namespace winoq {
namespace {

Conv1DLayer layer_1x1(std::vector<float> taps, std::vector<float> bias = {}) {
  const std::size_t k = taps.size();
  return Conv1DLayer{TensorF32(Shape{1, 1, k}, std::move(taps)), std::move(bias), 1, {}};
}

const TensorF32 kRamp(Shape{1, 1, 4}, std::vector<float>{1, 2, 3, 4});

TEST(Conv1dDirect, BoxKernel) {
  const TensorF32 y = conv1d_f32_direct(kRamp, layer_1x1({1, 1, 1}));
  ASSERT_EQ(y.shape(), (Shape{1, 1, 2}));
  EXPECT_EQ(y.data()[0], 6.0f);
  EXPECT_EQ(y.data()[1], 9.0f);
}

TEST(Conv1dDirect, CorrelationConvention) {
  const TensorF32 y = conv1d_f32_direct(kRamp, layer_1x1({1, 0, 0}));
  EXPECT_EQ(y.data()[0], 1.0f);
  EXPECT_EQ(y.data()[1], 2.0f);
}

TEST(Conv1dDirect, ZeroKernelGivesBias) {
  const TensorF32 in = testing::random_tensor(Shape{2, 3, 10}, 3);
  Conv1DLayer l{TensorF32(Shape{2, 3, 4}, 0.0f), {5.0f, 5.0f}, 1, {}};
  const TensorF32 y = conv1d_f32_direct(in, l);
  for (float v : y.data()) EXPECT_EQ(v, 5.0f);
}

TEST(Conv1dDirect, ShapeMismatch) {
  Conv1DLayer l{TensorF32(Shape{1, 2, 3}, 1.0f), {}, 1, {}};
  EXPECT_THROW(conv1d_f32_direct(kRamp, l), Error);
  EXPECT_THROW(conv1d_f32_direct(kRamp, layer_1x1({1, 1, 1, 1, 1})), Error);
}

TEST(Conv1dDirect, StrideAndPadding) {
  Conv1DLayer l = layer_1x1({1, 2});
  l.stride = 2;
  l.padding = {1, 1};
  // padded: 0 1 2 3 4 0 -> windows at 0, 2, 4
  const TensorF32 y = conv1d_f32_direct(kRamp, l);
  ASSERT_EQ(y.shape().width, 3u);
  EXPECT_EQ(y.data()[0], 2.0f);
  EXPECT_EQ(y.data()[1], 2.0f + 6.0f);
  EXPECT_EQ(y.data()[2], 4.0f);
}

TEST(Conv1dDirect, SamePaddingPreservesWidth) {
  for (std::size_t k = 1; k <= 15; k += 2) {
    const Padding p = same_padding(k);
    EXPECT_EQ(p.left, p.right);
    EXPECT_EQ(conv_output_width(37, k, 1, p), 37u);
  }
}

TEST(Conv1dWinograd, BoxKernel) {
  const TensorF32 y = conv1d_f32_winograd(kRamp, layer_1x1({1, 1, 1}));
  EXPECT_NEAR(y.data()[0], 6.0, 1e-6);
  EXPECT_NEAR(y.data()[1], 9.0, 1e-6);
}

double max_rel(const TensorF32& a, const TensorF32& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
    den = std::max(den, std::abs(static_cast<double>(b.data()[i])));
  }
  return num / den;
}

TEST(Conv1dWinograd, MatchesDirectForAllSplits) {
  for (std::size_t k = 3; k <= 16; ++k) {
    for (std::size_t width : {std::size_t{64}, std::size_t{37}}) {
      const TensorF32 in = testing::random_tensor(Shape{2, 4, width}, 40 + k);
      Conv1DLayer l{testing::random_tensor(Shape{5, 4, k}, 90 + k), std::vector<float>(5, 0.25f),
                    1, same_padding(k)};
      EXPECT_LT(max_rel(conv1d_f32_winograd(in, l), conv1d_f32_direct(in, l)), 1e-4)
          << "k=" << k << " width=" << width;
    }
  }
}

TEST(Conv1dWinograd, UnsupportedPlans) {
  try {
    conv1d_f32_winograd(kRamp, layer_1x1({1, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedPlan);
  }
  Conv1DLayer strided = layer_1x1({1, 1, 1});
  strided.stride = 2;
  EXPECT_THROW(conv1d_f32_winograd(kRamp, strided), Error);
}

QuantizedConv1D qlayer(TensorI8 w, double s, const QuantScheme& scheme, Padding pad = {}) {
  return QuantizedConv1D{QuantizedTensor(std::move(w), s, scheme), {}, 1, pad};
}

TEST(Conv1dInt8Gemm, HandSum) {
  const QuantizedTensor in(TensorI8(Shape{1, 1, 4}, std::vector<std::int8_t>{10, 20, 30, 40}),
                           1.0, plain_int8_scheme());
  const auto r = conv1d_int8_gemm(
      in, qlayer(TensorI8(Shape{1, 1, 3}, std::int8_t{1}), 1.0, plain_int8_scheme()));
  EXPECT_EQ(r.raw.data()[0], 60);
  EXPECT_EQ(r.raw.data()[1], 90);
}

TEST(Conv1dInt8Gemm, ZeroWeights) {
  const QuantizedTensor in(testing::random_i8(Shape{1, 3, 20}, 127, 1), 1.0, plain_int8_scheme());
  const auto r = conv1d_int8_gemm(
      in, qlayer(TensorI8(Shape{2, 3, 5}, std::int8_t{0}), 1.0, plain_int8_scheme()));
  for (auto v : r.raw.data()) EXPECT_EQ(v, 0);
}

TEST(Conv1dInt8Gemm, DequantizationScales) {
  const QuantizedTensor in(testing::random_i8(Shape{1, 2, 12}, 63, 2), 0.5,
                           winograd_activation_scheme());
  const auto r = conv1d_int8_gemm(
      in, qlayer(testing::random_i8(Shape{3, 2, 4}, 42, 3), 0.1, winograd_weight_scheme()));
  for (std::size_t i = 0; i < r.raw.size(); ++i) {
    EXPECT_FLOAT_EQ(r.dequantized.data()[i], static_cast<float>(r.raw.data()[i] * 0.05));
  }
}

TEST(Conv1dInt8Gemm, MatchesNaiveCorrelation) {
  for (std::size_t stride : {1, 2, 3}) {
    const Shape s{2, 3, 29};
    const TensorI8 x = testing::random_i8(s, 127, 10 + stride);
    const TensorI8 w = testing::random_i8(Shape{4, 3, 7}, 127, 20 + stride);
    QuantizedConv1D l = qlayer(w, 1.0, plain_int8_scheme(), Padding{2, 1});
    l.stride = stride;
    const auto r = conv1d_int8_gemm(QuantizedTensor(x, 1.0, plain_int8_scheme()), l, 3);
    const auto ref = testing::naive_int_corr(std::vector<int>(x.data().begin(), x.data().end()),
                                             2, 3, 29,
                                             std::vector<int>(w.data().begin(), w.data().end()),
                                             4, 7, 2, 1, stride);
    ASSERT_EQ(r.raw.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_EQ(r.raw.data()[i], ref[i]);
  }
}

TEST(Conv1dInt8Gemm, Linearity) {
  const TensorI8 x = testing::random_i8(Shape{1, 3, 16}, 63, 4);
  TensorI8 x2 = x;
  for (auto& v : x2.data()) v = static_cast<std::int8_t>(2 * v);
  const auto l = qlayer(testing::random_i8(Shape{2, 3, 5}, 42, 5), 1.0, winograd_weight_scheme());
  const auto a = conv1d_int8_gemm(QuantizedTensor(x, 1.0, plain_int8_scheme()), l);
  const auto b = conv1d_int8_gemm(QuantizedTensor(x2, 1.0, plain_int8_scheme()), l);
  for (std::size_t i = 0; i < a.raw.size(); ++i) EXPECT_EQ(b.raw.data()[i], 2 * a.raw.data()[i]);
}

TEST(Conv1dInt8Gemm, FakeQuantConsistency) {
  const TensorF32 x = testing::random_tensor(Shape{2, 4, 30}, 6);
  const TensorF32 w = testing::random_tensor(Shape{3, 4, 5}, 7, -0.3, 0.3);
  const double sx = 1.0 / 63, sw = 0.3 / 42;
  const auto qx = quantize(x, sx, winograd_activation_scheme());
  const auto qw = quantize(w, sw, winograd_weight_scheme());
  const std::vector<float> bias{0.1f, -0.2f, 0.0f};
  const auto r = conv1d_int8_gemm(qx, QuantizedConv1D{qw, bias, 1, same_padding(5)});
  const TensorF32 ref = conv1d_f32_direct(
      fake_quantize(x, sx, winograd_activation_scheme()),
      Conv1DLayer{fake_quantize(w, sw, winograd_weight_scheme()), bias, 1, same_padding(5)});
  EXPECT_LT(max_rel(r.dequantized, ref), 1e-5);
}

TEST(Conv1dInt8Gemm, HeadroomCheck) {
  // c_in * k * 127 * 127 >= 2^31 once c_in * k >= 133144.
  const QuantizedTensor in(TensorI8(Shape{1, 4500, 30}, std::int8_t{1}), 1.0, plain_int8_scheme());
  const auto l = qlayer(TensorI8(Shape{1, 4500, 30}, std::int8_t{1}), 1.0, plain_int8_scheme());
  try {
    conv1d_int8_gemm(in, l);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOverflowRisk);
  }
}

}  // namespace
}  // namespace winoq
