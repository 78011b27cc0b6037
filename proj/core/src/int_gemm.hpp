// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

namespace winoq::detail {

// C[M x N] = A[M x K] * Bt[N x K]^T, all row-major, int8 operands widened to
// 16-bit and accumulated in int32. Rows of C are split across `threads`
// workers; the result does not depend on the split.
void gemm_s8s8s32(std::size_t M, std::size_t N, std::size_t K, const std::int8_t* A,
                  const std::int8_t* Bt, std::int32_t* C, int threads = 1);

}  // namespace winoq::detail
