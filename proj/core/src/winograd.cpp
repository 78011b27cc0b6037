// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/winograd.hpp"

#include <cstdlib>
#include <limits>
#include <numeric>

#include "conv_checks.hpp"
#include "int_gemm.hpp"
#include "json.hpp"

namespace winoq {
namespace {

template <std::size_t R, std::size_t C>
int max_row_abs_sum(const std::array<std::array<int, C>, R>& m) {
  int best = 0;
  for (const auto& row : m) {
    int s = 0;
    for (int v : row) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

const WinogradBasis& WinogradBasis::standard() {
  static const WinogradBasis basis{
      .BT = {{{1, 0, -1, 0}, {0, 1, 1, 0}, {0, -1, 1, 0}, {0, 1, 0, -1}}},
      .G2 = {{{2, 0, 0}, {1, 1, 1}, {1, -1, 1}, {0, 0, 2}}},
      .AT = {{{1, 1, 1, 0}, {0, 1, -1, -1}}},
      .output_rescale_den = 2,
  };
  return basis;
}

int WinogradBasis::input_amplification() const { return max_row_abs_sum(BT); }
int WinogradBasis::weight_amplification() const { return max_row_abs_sum(G2); }
int WinogradBasis::output_amplification() const { return max_row_abs_sum(AT); }

const char* to_string(ConvPath path) {
  return path == ConvPath::kWinograd ? "winograd" : "plain-int8";
}

Conv1DPlan plan_conv1d(std::size_t k, std::size_t stride, const QuantScheme& act_scheme,
                       const QuantScheme& wt_scheme) {
  if (k == 0) fail(ErrorCode::kPrecondition, "kernel size must be >= 1");
  detail::check_stride(stride);
  Conv1DPlan plan;
  plan.k = k;
  plan.stride = stride;
  if (k >= 3 && stride == 1) {
    plan.path = ConvPath::kWinograd;
    plan.act_scheme = act_scheme;
    plan.wt_scheme = wt_scheme;
    for (std::size_t g = 0; g < k / 3; ++g) plan.wino_groups.push_back(3 * g);
    plan.remainder = TapRange{3 * (k / 3), k % 3};
  } else {
    plan.path = ConvPath::kPlainInt8;
    plan.act_scheme = plain_int8_scheme();
    plan.wt_scheme = plain_int8_scheme();
    plan.remainder = TapRange{0, k};
  }
  return plan;
}

OverflowReport check_overflow(const QuantScheme& act_scheme, const QuantScheme& wt_scheme) {
  const WinogradBasis& basis = WinogradBasis::standard();
  OverflowReport r;
  r.max_transformed_act = basis.input_amplification() * act_scheme.T_s();
  r.max_transformed_wt = basis.weight_amplification() * wt_scheme.T_s();
  r.storage_limit = std::min(act_scheme.storage_limit(), wt_scheme.storage_limit());
  r.fits_act = r.max_transformed_act <= r.storage_limit;
  r.fits_wt = r.max_transformed_wt <= r.storage_limit;
  return r;
}

std::string to_json(const OverflowReport& report, const QuantScheme& act_scheme,
                    const QuantScheme& wt_scheme) {
  nlohmann::json j = {
      {"act_T_s", act_scheme.T_s()},
      {"wt_T_s", wt_scheme.T_s()},
      {"max_transformed_act", report.max_transformed_act},
      {"max_transformed_wt", report.max_transformed_wt},
      {"storage_limit", report.storage_limit},
      {"fits_act", report.fits_act},
      {"fits_wt", report.fits_wt},
      {"fits", report.fits()},
  };
  return j.dump();
}

std::array<int, 4> transform_input_tile(const std::array<int, 4>& d,
                                        const QuantScheme& act_scheme) {
  for (int v : d) {
    if (std::abs(v) > act_scheme.T_s()) {
      fail(ErrorCode::kRange, "input tile value " + std::to_string(v) + " exceeds T_s=" +
                                  std::to_string(act_scheme.T_s()));
    }
  }
  const auto& BT = WinogradBasis::standard().BT;
  std::array<int, 4> out{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out[r] += BT[r][c] * d[c];
  }
  return out;
}

std::array<int, 4> transform_weight(const std::array<int, 3>& g, const QuantScheme& wt_scheme) {
  for (int v : g) {
    if (std::abs(v) > wt_scheme.T_s()) {
      fail(ErrorCode::kRange, "weight value " + std::to_string(v) + " exceeds T_s=" +
                                  std::to_string(wt_scheme.T_s()));
    }
  }
  const auto& G2 = WinogradBasis::standard().G2;
  std::array<int, 4> out{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 3; ++c) out[r] += G2[r][c] * g[c];
  }
  return out;
}

namespace {

void validate_plan(const Conv1DPlan& plan, const QuantizedConv1D& layer) {
  if (plan.path != ConvPath::kWinograd) {
    fail(ErrorCode::kUnsupportedPlan, "plan is not on the Winograd path");
  }
  if (layer.stride != 1 || plan.stride != 1) {
    fail(ErrorCode::kUnsupportedPlan, "Winograd path requires stride 1");
  }
  if (plan.k != layer.kernel() || plan.k < 3) {
    fail(ErrorCode::kUnsupportedPlan, "plan kernel size " + std::to_string(plan.k) +
                                          " does not match layer kernel " +
                                          std::to_string(layer.kernel()));
  }
  for (std::size_t offset : plan.wino_groups) {
    if (offset + 3 > plan.k) fail(ErrorCode::kBounds, "Winograd group runs past the kernel");
  }
  if (plan.remainder.len > 0 && plan.remainder.offset + plan.remainder.len > plan.k) {
    fail(ErrorCode::kBounds, "remainder taps run past the kernel");
  }
  if (3 * plan.wino_groups.size() + plan.remainder.len != plan.k) {
    fail(ErrorCode::kPrecondition, "plan does not cover every kernel tap");
  }
}

}  // namespace

IntConvResult conv1d_int8_winograd(const QuantizedTensor& input, const QuantizedConv1D& layer,
                                   const Conv1DPlan& plan, int threads) {
  validate_plan(plan, layer);
  const QuantScheme& act = input.scheme();
  const QuantScheme& wt = layer.weights.scheme();
  const OverflowReport overflow = check_overflow(act, wt);
  if (!overflow.fits()) {
    fail(ErrorCode::kUnsafeScheme,
         "Winograd transforms overflow storage: act " + std::to_string(overflow.max_transformed_act) +
             ", wt " + std::to_string(overflow.max_transformed_wt) + " > " +
             std::to_string(overflow.storage_limit));
  }

  const Shape& in = input.shape();
  const std::size_t c_in = layer.c_in();
  const std::size_t c_out = layer.c_out();
  const std::size_t k = plan.k;
  detail::check_channels(in, c_in);
  const auto bias = detail::bias_or_zeros(layer.bias, c_out);
  const std::size_t out_w = conv_output_width(in.width, k, 1, layer.padding);

  const std::size_t groups = plan.wino_groups.size();
  const std::size_t rem = plan.remainder.len;
  const WinogradBasis& basis = WinogradBasis::standard();

  // Head-room: Winograd-domain sums, the AT combination, and the doubled
  // remainder must all stay inside int32.
  const double wino_acc = static_cast<double>(c_in) * static_cast<double>(groups) *
                          overflow.max_transformed_act * overflow.max_transformed_wt;
  const double out_acc = basis.output_amplification() * wino_acc +
                         2.0 * static_cast<double>(c_in) * static_cast<double>(rem) * act.T_s() *
                             wt.T_s();
  const double tail_acc = 2.0 * static_cast<double>(c_in) * static_cast<double>(k) * act.T_s() *
                          wt.T_s();
  constexpr double limit = static_cast<double>(std::numeric_limits<std::int32_t>::max());
  if (wino_acc >= limit || out_acc >= limit || tail_acc >= limit) {
    fail(ErrorCode::kOverflowRisk, "int32 accumulator head-room exceeded for c_in=" +
                                       std::to_string(c_in) + ", k=" + std::to_string(k));
  }

  // Transformed weights: four [c_out x (c_in*groups)] int8 matrices.
  const std::size_t KW = c_in * groups;
  std::array<std::vector<std::int8_t>, 4> U;
  for (auto& u : U) u.assign(c_out * KW, 0);
  const auto& wq = layer.weights.values();
  for (std::size_t co = 0; co < c_out; ++co) {
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      auto w = wq.row(co, ci);
      for (std::size_t g = 0; g < groups; ++g) {
        const std::int8_t* taps = w.data() + plan.wino_groups[g];
        for (int r = 0; r < 4; ++r) {
          int acc = 0;
          for (int c = 0; c < 3; ++c) acc += basis.G2[r][c] * taps[c];
          U[r][co * KW + ci * groups + g] = static_cast<std::int8_t>(acc);
        }
      }
    }
  }
  // Remainder taps as a [c_out x (c_in*rem)] GEMM operand.
  std::vector<std::int8_t> W_rem(c_out * c_in * rem);
  for (std::size_t co = 0; co < c_out; ++co) {
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      auto w = wq.row(co, ci);
      for (std::size_t j = 0; j < rem; ++j) {
        W_rem[co * c_in * rem + ci * rem + j] = w[plan.remainder.offset + j];
      }
    }
  }

  const std::size_t tiles = out_w / 2;
  const std::size_t tiled_w = 2 * tiles;
  TensorI32 raw(Shape{in.batch, c_out, out_w}, 0);
  TensorF32 deq(Shape{in.batch, c_out, out_w}, 0.0f);

  std::array<std::vector<std::int8_t>, 4> V;
  for (auto& v : V) v.assign(KW * tiles, 0);
  std::array<std::vector<std::int32_t>, 4> M;
  for (auto& m : M) m.assign(c_out * tiles, 0);
  std::vector<std::int8_t> col_rem(c_in * rem * tiled_w);
  std::vector<std::int32_t> R(c_out * tiled_w, 0);
  std::vector<std::vector<std::int8_t>> rows(c_in);

  const double rescale = input.scale() * layer.weights.scale() / basis.output_rescale_den;

  for (std::size_t b = 0; b < in.batch; ++b) {
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      rows[ci] = detail::padded_row(input.values().row(b, ci), layer.padding);
    }
    // Input transforms. A group at tap offset o reads window [2t+o, 2t+o+3].
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      const std::int8_t* x = rows[ci].data();
      for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t colrow = ci * groups + g;
        for (std::size_t t = 0; t < tiles; ++t) {
          const std::int8_t* d = x + 2 * t + plan.wino_groups[g];
          for (int r = 0; r < 4; ++r) {
            int acc = 0;
            for (int c = 0; c < 4; ++c) acc += basis.BT[r][c] * d[c];
            V[r][t * KW + colrow] = static_cast<std::int8_t>(acc);
          }
        }
      }
    }
    // Hadamard products summed over (c_in, group) in the Winograd domain.
    if (tiles > 0) {
      for (int r = 0; r < 4; ++r) {
        detail::gemm_s8s8s32(c_out, tiles, KW, U[r].data(), V[r].data(), M[r].data(), threads);
      }
    }
    if (rem > 0 && tiled_w > 0) {
      for (std::size_t ci = 0; ci < c_in; ++ci) {
        const std::int8_t* x = rows[ci].data() + plan.remainder.offset;
        for (std::size_t i = 0; i < tiled_w; ++i) {
          std::int8_t* dst = &col_rem[i * c_in * rem + ci * rem];
          for (std::size_t j = 0; j < rem; ++j) dst[j] = x[i + j];
        }
      }
      detail::gemm_s8s8s32(c_out, tiled_w, c_in * rem, W_rem.data(), col_rem.data(), R.data(),
                           threads);
    }

    for (std::size_t co = 0; co < c_out; ++co) {
      auto out_row = raw.row(b, co);
      for (std::size_t t = 0; t < tiles; ++t) {
        std::array<std::int32_t, 4> m{M[0][co * tiles + t], M[1][co * tiles + t],
                                      M[2][co * tiles + t], M[3][co * tiles + t]};
        std::int32_t y0 = 0;
        std::int32_t y1 = 0;
        for (int c = 0; c < 4; ++c) {
          y0 += basis.AT[0][c] * m[c];
          y1 += basis.AT[1][c] * m[c];
        }
        if (rem > 0) {
          y0 += 2 * R[co * tiled_w + 2 * t];
          y1 += 2 * R[co * tiled_w + 2 * t + 1];
        }
        out_row[2 * t] = y0;
        out_row[2 * t + 1] = y1;
      }
      if (out_w % 2 == 1) {
        const std::size_t i = out_w - 1;
        std::int32_t acc = 0;
        for (std::size_t ci = 0; ci < c_in; ++ci) {
          auto w = wq.row(co, ci);
          for (std::size_t j = 0; j < k; ++j) acc += w[j] * rows[ci][i + j];
        }
        out_row[i] = 2 * acc;
      }
      auto deq_row = deq.row(b, co);
      for (std::size_t i = 0; i < out_w; ++i) {
        deq_row[i] = static_cast<float>(static_cast<double>(out_row[i]) * rescale + bias[co]);
      }
    }
  }
  return {std::move(raw), std::move(deq)};
}

Rational Rational::reduced(std::int64_t num, std::int64_t den) {
  if (den == 0) fail(ErrorCode::kDomain, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return Rational{num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

Rational theoretical_speedup(std::size_t k) {
  if (k < 3) fail(ErrorCode::kDomain, "speedup model needs k >= 3, got " + std::to_string(k));
  const auto kk = static_cast<std::int64_t>(k);
  return Rational::reduced(2 * kk, 4 * (kk / 3) + 2 * (kk % 3));
}

Rational MultCounts::ratio() const {
  return Rational::reduced(static_cast<std::int64_t>(gemm_mults),
                           static_cast<std::int64_t>(wino_mults));
}

MultCounts count_multiplications(const Conv1DPlan& plan, std::size_t out_width, std::size_t c_in,
                                 std::size_t c_out) {
  MultCounts counts;
  counts.partial_tile = out_width % 2 == 1;
  counts.counted_width = out_width - out_width % 2;
  const std::uint64_t base = static_cast<std::uint64_t>(c_out) * c_in;
  counts.gemm_mults = base * counts.counted_width * plan.k;
  if (plan.path == ConvPath::kWinograd) {
    counts.wino_mults = base * (counts.counted_width / 2) *
                        (4 * plan.wino_groups.size() + 2 * plan.remainder.len);
  } else {
    counts.wino_mults = counts.gemm_mults;
  }
  return counts;
}

}  // namespace winoq
