// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/tensor.hpp"

namespace winoq {

std::string to_string(const Shape& shape) {
  return "(" + std::to_string(shape.batch) + "," + std::to_string(shape.channels) + "," +
         std::to_string(shape.width) + ")";
}

void validate_shape(const Shape& shape) {
  if (shape.batch == 0 || shape.channels == 0 || shape.width == 0) {
    fail(ErrorCode::kInvalidShape, "zero-sized dimension in shape " + to_string(shape));
  }
}

TensorF32 create(Shape shape, float fill) { return TensorF32(shape, fill); }

}  // namespace winoq
