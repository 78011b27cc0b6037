// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "winoq/rsq_train.hpp"

namespace winoq::rsq {

inline constexpr std::array<Mode, 3> kExperimentModes{Mode::kPtq, Mode::kRsqNoMse, Mode::kRsq};

struct ExperimentConfig {
  std::uint64_t first_seed = 0;
  std::size_t seeds = 30;
  RSQConfig base;  // seed and mode are overwritten per run
  ToyTopology topology;
};

struct ExperimentRun {
  std::uint64_t seed = 0;
  std::array<TrainResult, 3> results;  // indexed like kExperimentModes

  const TrainResult& at(Mode mode) const { return results[static_cast<int>(mode)]; }
};

struct OrderingCheck {
  std::string name;  // e.g. "rsq <= rsq_nomse"
  double lhs = 0.0;
  double rhs = 0.0;
  bool passed = false;
};

struct ExperimentSummary {
  ExperimentConfig config;
  std::vector<ExperimentRun> runs;
  std::array<double, 3> medians{};
  std::vector<OrderingCheck> orderings;  // median RSQ <= RSQ†, median RSQ† <= PTQ
  std::size_t strict_rsq_below_ptq = 0;  // seeds with RSQ < PTQ

  double median(Mode mode) const { return medians[static_cast<int>(mode)]; }
  // Median ordering holds and RSQ < PTQ strictly in at least 80% of seeds.
  bool passed() const;
};

double median_of(std::vector<double> values);

// One teacher per seed (built from that seed); each mode trains a fresh
// student from it with the same seed.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

// Probe batch for deploy_check on students trained with `seed`.
TensorF32 deploy_probe(const ToyModel& model, std::uint64_t seed, const RSQConfig& cfg);

std::string to_json(const ExperimentSummary& summary);

}  // namespace winoq::rsq
