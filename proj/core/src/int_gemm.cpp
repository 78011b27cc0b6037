// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "int_gemm.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace winoq::detail {
namespace {

std::int32_t dot(const std::int8_t* __restrict a, const std::int8_t* __restrict b, std::size_t K) {
  std::int32_t s = 0;
  for (std::size_t p = 0; p < K; ++p) s += std::int16_t{a[p]} * std::int16_t{b[p]};
  return s;
}

// 2x2 register block; both operands stream along K.
void gemm_rows(std::size_t row_begin, std::size_t row_end, std::size_t N, std::size_t K,
               const std::int8_t* A, const std::int8_t* Bt, std::int32_t* C) {
  std::size_t i = row_begin;
  for (; i + 2 <= row_end; i += 2) {
    const std::int8_t* __restrict a0 = A + i * K;
    const std::int8_t* __restrict a1 = a0 + K;
    std::int32_t* c0 = C + i * N;
    std::int32_t* c1 = c0 + N;
    std::size_t j = 0;
    for (; j + 2 <= N; j += 2) {
      const std::int8_t* __restrict b0 = Bt + j * K;
      const std::int8_t* __restrict b1 = b0 + K;
      std::int32_t s00 = 0, s01 = 0, s10 = 0, s11 = 0;
      for (std::size_t p = 0; p < K; ++p) {
        const std::int16_t x0 = a0[p], x1 = a1[p], y0 = b0[p], y1 = b1[p];
        s00 += x0 * y0;
        s01 += x0 * y1;
        s10 += x1 * y0;
        s11 += x1 * y1;
      }
      c0[j] = s00;
      c0[j + 1] = s01;
      c1[j] = s10;
      c1[j + 1] = s11;
    }
    for (; j < N; ++j) {
      c0[j] = dot(a0, Bt + j * K, K);
      c1[j] = dot(a1, Bt + j * K, K);
    }
  }
  for (; i < row_end; ++i) {
    for (std::size_t j = 0; j < N; ++j) C[i * N + j] = dot(A + i * K, Bt + j * K, K);
  }
}

}  // namespace

void gemm_s8s8s32(std::size_t M, std::size_t N, std::size_t K, const std::int8_t* A,
                  const std::int8_t* Bt, std::int32_t* C, int threads) {
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, M == 0 ? 1 : M);
  if (workers == 1) {
    gemm_rows(0, M, N, K, A, Bt, C);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  // Even chunks keep the 2-row blocks intact.
  std::size_t chunk = (M + workers - 1) / workers;
  chunk += chunk % 2;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(M, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([=] { gemm_rows(begin, end, N, K, A, Bt, C); });
  }
}

}  // namespace winoq::detail
