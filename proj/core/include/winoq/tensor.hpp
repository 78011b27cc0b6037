// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "winoq/error.hpp"

namespace winoq {

// (batch, channels, width), width fastest. Kernel tensors reuse the same
// shape as (c_out, c_in, k).
struct Shape {
  std::size_t batch = 1;
  std::size_t channels = 1;
  std::size_t width = 1;

  std::size_t numel() const { return batch * channels * width; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& shape);

// Throws kInvalidShape when any dimension is zero.
void validate_shape(const Shape& shape);

template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  Tensor(Shape shape, T fill) : shape_(shape) {
    validate_shape(shape_);
    data_.assign(shape_.numel(), fill);
  }

  Tensor(Shape shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    validate_shape(shape_);
    if (data_.size() != shape_.numel()) {
      fail(ErrorCode::kInvalidShape, "data length " + std::to_string(data_.size()) +
                                         " does not match shape " + to_string(shape_));
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }

  std::size_t offset(std::size_t b, std::size_t c, std::size_t w) const {
    return (b * shape_.channels + c) * shape_.width + w;
  }
  const T& at(std::size_t b, std::size_t c, std::size_t w) const { return data_[offset(b, c, w)]; }
  T& at(std::size_t b, std::size_t c, std::size_t w) { return data_[offset(b, c, w)]; }

  // Contiguous width row for (b, c).
  std::span<const T> row(std::size_t b, std::size_t c) const {
    return std::span<const T>(data_).subspan(offset(b, c, 0), shape_.width);
  }
  std::span<T> row(std::size_t b, std::size_t c) {
    return std::span<T>(data_).subspan(offset(b, c, 0), shape_.width);
  }

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_{};
  std::vector<T> data_;
};

using TensorF32 = Tensor<float>;
using TensorI32 = Tensor<std::int32_t>;
using TensorI8 = Tensor<std::int8_t>;

TensorF32 create(Shape shape, float fill);

// Copies taps [offset, offset + len) of a (c_out, c_in, k) kernel.
template <typename T>
Tensor<T> tap_group(const Tensor<T>& weights, std::size_t offset, std::size_t len) {
  const Shape& s = weights.shape();
  if (len == 0 || offset + len > s.width) {
    fail(ErrorCode::kBounds, "tap slice [" + std::to_string(offset) + ", " +
                                 std::to_string(offset + len) + ") outside kernel of " +
                                 std::to_string(s.width) + " taps");
  }
  Tensor<T> out(Shape{s.batch, s.channels, len}, T{});
  for (std::size_t co = 0; co < s.batch; ++co) {
    for (std::size_t ci = 0; ci < s.channels; ++ci) {
      auto src = weights.row(co, ci).subspan(offset, len);
      auto dst = out.row(co, ci);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  }
  return out;
}

// Inverse of a covering sequence of tap_group slices.
template <typename T>
Tensor<T> concat_taps(std::span<const Tensor<T>> groups) {
  if (groups.empty()) fail(ErrorCode::kInvalidShape, "no tap groups to concatenate");
  const Shape first = groups.front().shape();
  std::size_t k = 0;
  for (const auto& g : groups) {
    if (g.shape().batch != first.batch || g.shape().channels != first.channels) {
      fail(ErrorCode::kShapeMismatch, "tap groups disagree on channel counts");
    }
    k += g.shape().width;
  }
  Tensor<T> out(Shape{first.batch, first.channels, k}, T{});
  std::size_t at = 0;
  for (const auto& g : groups) {
    for (std::size_t co = 0; co < first.batch; ++co) {
      for (std::size_t ci = 0; ci < first.channels; ++ci) {
        auto src = g.row(co, ci);
        std::copy(src.begin(), src.end(), out.row(co, ci).begin() + static_cast<std::ptrdiff_t>(at));
      }
    }
    at += g.shape().width;
  }
  return out;
}

}  // namespace winoq
