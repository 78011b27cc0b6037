// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "winoq/winograd.hpp"

namespace winoq {

// Plan corruptions used to prove that the suite catches broken operators.
enum class PlanFault { kNone, kRemainderOffsetMinusOne };

struct EquivalenceConfig {
  std::vector<std::size_t> kernel_sizes;  // empty means 3..16
  std::size_t cases_per_kernel = 1000;
  std::uint64_t seed = 0;
  std::size_t max_channels = 8;
  std::size_t min_width = 4;
  std::size_t max_width = 64;
  bool random_padding = true;
  QuantScheme act_scheme = winograd_activation_scheme();
  QuantScheme wt_scheme = winograd_weight_scheme();
  PlanFault fault = PlanFault::kNone;
};

struct Divergence {
  std::size_t case_index = 0;
  Shape input_shape;
  std::size_t c_out = 0;
  Padding padding;
  std::size_t batch = 0, channel = 0, position = 0;
  std::int64_t winograd_raw2x = 0;
  std::int64_t gemm_raw = 0;
};

struct KernelEquivalence {
  std::size_t k = 0;
  ConvPath path = ConvPath::kWinograd;
  std::size_t cases = 0;
  std::size_t mismatched_cases = 0;
  std::size_t odd_elements = 0;  // raw2x values that are not even
  std::optional<Divergence> first_divergence;

  bool passed() const { return mismatched_cases == 0 && odd_elements == 0; }
};

struct EquivalenceSummary {
  std::vector<KernelEquivalence> kernels;
  bool passed() const;
};

// Randomized INT8 Winograd vs INT8 GEMM comparison: raw2x == 2 * raw for every
// element of every case. Kernels that plan onto the plain INT8 path are
// reported and pass trivially.
EquivalenceSummary run_equivalence_suite(const EquivalenceConfig& cfg);

std::string to_string(const Divergence& d);
std::string to_json(const EquivalenceSummary& summary, const EquivalenceConfig& cfg);

}  // namespace winoq
