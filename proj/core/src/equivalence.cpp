// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/equivalence.hpp"

#include <random>
#include <sstream>

#include "json.hpp"

namespace winoq {
namespace {

TensorI8 random_values(Shape shape, int T_s, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(-T_s, T_s);
  TensorI8 t(shape, std::int8_t{0});
  for (auto& v : t.data()) v = static_cast<std::int8_t>(dist(rng));
  return t;
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

void run_kernel(std::size_t k, const EquivalenceConfig& cfg, std::mt19937_64& rng,
                KernelEquivalence& result) {
  Conv1DPlan plan = plan_conv1d(k, 1, cfg.act_scheme, cfg.wt_scheme);
  result.path = plan.path;
  if (plan.path != ConvPath::kWinograd) {
    result.cases = 0;
    return;
  }
  if (cfg.fault == PlanFault::kRemainderOffsetMinusOne && plan.remainder.len > 0) {
    plan.remainder.offset -= 1;
  }
  for (std::size_t n = 0; n < cfg.cases_per_kernel; ++n) {
    const std::size_t c_in = pick(rng, 1, cfg.max_channels);
    const std::size_t c_out = pick(rng, 1, cfg.max_channels);
    const std::size_t batch = pick(rng, 1, 2);
    Padding pad{};
    if (cfg.random_padding) pad = Padding{pick(rng, 0, k - 1), pick(rng, 0, k - 1)};
    std::size_t width = pick(rng, cfg.min_width, cfg.max_width);
    if (width + pad.left + pad.right < k) width = k - pad.left - pad.right;

    const Shape in_shape{batch, c_in, width};
    QuantizedTensor input(random_values(in_shape, cfg.act_scheme.T_s(), rng), 1.0,
                          cfg.act_scheme);
    QuantizedConv1D layer{
        QuantizedTensor(random_values(Shape{c_out, c_in, k}, cfg.wt_scheme.T_s(), rng), 1.0,
                        cfg.wt_scheme),
        {}, 1, pad};

    const IntConvResult wino = conv1d_int8_winograd(input, layer, plan);
    const IntConvResult gemm = conv1d_int8_gemm(input, layer);
    ++result.cases;

    bool mismatch = wino.raw.shape() != gemm.raw.shape();
    const auto w = wino.raw.data();
    const auto g = gemm.raw.data();
    for (std::size_t i = 0; i < w.size() && i < g.size(); ++i) {
      if (w[i] % 2 != 0) ++result.odd_elements;
      if (static_cast<std::int64_t>(w[i]) != 2 * static_cast<std::int64_t>(g[i])) {
        mismatch = true;
        if (!result.first_divergence) {
          const Shape s = gemm.raw.shape();
          Divergence d;
          d.case_index = n;
          d.input_shape = in_shape;
          d.c_out = c_out;
          d.padding = pad;
          d.batch = i / (s.channels * s.width);
          d.channel = (i / s.width) % s.channels;
          d.position = i % s.width;
          d.winograd_raw2x = w[i];
          d.gemm_raw = g[i];
          result.first_divergence = d;
        }
      }
    }
    if (mismatch) ++result.mismatched_cases;
  }
}

}  // namespace

bool EquivalenceSummary::passed() const {
  for (const auto& k : kernels) {
    if (!k.passed()) return false;
  }
  return true;
}

EquivalenceSummary run_equivalence_suite(const EquivalenceConfig& cfg) {
  std::vector<std::size_t> ks = cfg.kernel_sizes;
  if (ks.empty()) {
    for (std::size_t k = 3; k <= 16; ++k) ks.push_back(k);
  }
  EquivalenceSummary summary;
  for (std::size_t k : ks) {
    // Each kernel size gets its own stream so results do not depend on the
    // order or subset of the grid.
    std::mt19937_64 rng(cfg.seed * 1000003ULL + k);
    KernelEquivalence result;
    result.k = k;
    run_kernel(k, cfg, rng, result);
    summary.kernels.push_back(result);
  }
  return summary;
}

std::string to_string(const Divergence& d) {
  std::ostringstream os;
  os << "case " << d.case_index << " input " << to_string(d.input_shape) << " c_out " << d.c_out
     << " pad (" << d.padding.left << "," << d.padding.right << ") at [" << d.batch << ","
     << d.channel << "," << d.position << "]: winograd raw2x " << d.winograd_raw2x
     << " != 2 * gemm raw " << d.gemm_raw;
  return os.str();
}

std::string to_json(const EquivalenceSummary& summary, const EquivalenceConfig& cfg) {
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& k : summary.kernels) {
    nlohmann::json row = {
        {"k", k.k},
        {"path", to_string(k.path)},
        {"cases", k.cases},
        {"mismatched_cases", k.mismatched_cases},
        {"odd_elements", k.odd_elements},
        {"passed", k.passed()},
    };
    if (k.first_divergence) row["first_divergence"] = to_string(*k.first_divergence);
    cases.push_back(row);
  }
  nlohmann::json j = {
      {"seed", cfg.seed},
      {"cases_per_kernel", cfg.cases_per_kernel},
      {"act_T_s", cfg.act_scheme.T_s()},
      {"wt_T_s", cfg.wt_scheme.T_s()},
      {"passed", summary.passed()},
      {"kernels", cases},
  };
  return j.dump(2);
}

}  // namespace winoq
