// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "winoq/reference_conv.hpp"

namespace winoq::detail {

inline void check_channels(const Shape& input, std::size_t c_in) {
  if (input.channels != c_in) {
    fail(ErrorCode::kShapeMismatch, "input has " + std::to_string(input.channels) +
                                        " channels, layer expects " + std::to_string(c_in));
  }
}

inline std::vector<float> bias_or_zeros(const std::vector<float>& bias, std::size_t c_out) {
  if (bias.empty()) return std::vector<float>(c_out, 0.0f);
  if (bias.size() != c_out) {
    fail(ErrorCode::kShapeMismatch, "bias has " + std::to_string(bias.size()) +
                                        " entries for " + std::to_string(c_out) + " outputs");
  }
  return bias;
}

inline void check_stride(std::size_t stride) {
  if (stride == 0) fail(ErrorCode::kPrecondition, "stride must be >= 1");
}

// Zero-padded copy of one input row.
template <typename T>
std::vector<T> padded_row(std::span<const T> row, const Padding& pad) {
  std::vector<T> out(pad.left + row.size() + pad.right, T{});
  std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(pad.left));
  return out;
}

}  // namespace winoq::detail
