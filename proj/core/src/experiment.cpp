// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/experiment.hpp"

#include <algorithm>

#include "json.hpp"

namespace winoq::rsq {

double median_of(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::kPrecondition, "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

bool ExperimentSummary::passed() const {
  for (const auto& o : orderings) {
    if (!o.passed) return false;
  }
  // 4 of 5 seeds, generalised to any seed count.
  return !runs.empty() && 5 * strict_rsq_below_ptq >= 4 * runs.size();
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  if (cfg.seeds == 0) fail(ErrorCode::kPrecondition, "experiment needs at least one seed");
  ExperimentSummary summary;
  summary.config = cfg;
  std::array<std::vector<double>, 3> mse;
  for (std::size_t n = 0; n < cfg.seeds; ++n) {
    const std::uint64_t seed = cfg.first_seed + n;
    const ToyModel teacher = make_toy_teacher(cfg.topology, seed);
    ExperimentRun run;
    run.seed = seed;
    for (std::size_t m = 0; m < kExperimentModes.size(); ++m) {
      RSQConfig rc = cfg.base;
      rc.seed = seed;
      rc.mode = kExperimentModes[m];
      run.results[m] = run_rsq_training(teacher, rc);
      mse[m].push_back(run.results[m].final_output_mse);
    }
    if (run.at(Mode::kRsq).final_output_mse < run.at(Mode::kPtq).final_output_mse) {
      ++summary.strict_rsq_below_ptq;
    }
    summary.runs.push_back(std::move(run));
  }
  for (std::size_t m = 0; m < 3; ++m) summary.medians[m] = median_of(mse[m]);
  const double ptq = summary.median(Mode::kPtq);
  const double nomse = summary.median(Mode::kRsqNoMse);
  const double rsq = summary.median(Mode::kRsq);
  summary.orderings.push_back({"rsq <= rsq_nomse", rsq, nomse, rsq <= nomse});
  summary.orderings.push_back({"rsq_nomse <= ptq", nomse, ptq, nomse <= ptq});
  return summary;
}

TensorF32 deploy_probe(const ToyModel& model, std::uint64_t seed, const RSQConfig& cfg) {
  return gaussian_batch(Shape{cfg.batch, model.in_channels, cfg.width},
                        seed * 0x9E3779B97F4A7C15ULL + 4);
}

std::string to_json(const ExperimentSummary& summary) {
  using nlohmann::json;
  json runs = json::array();
  for (const auto& run : summary.runs) {
    for (const auto& r : run.results) {
      runs.push_back(json::parse(to_json(r)));
    }
  }
  json orderings = json::array();
  for (const auto& o : summary.orderings) {
    orderings.push_back({{"check", o.name}, {"lhs", o.lhs}, {"rhs", o.rhs}, {"passed", o.passed}});
  }
  json medians = json::object();
  for (std::size_t m = 0; m < 3; ++m) medians[to_string(kExperimentModes[m])] = summary.medians[m];
  const auto& base = summary.config.base;
  json j = {
      {"first_seed", summary.config.first_seed},
      {"seeds", summary.config.seeds},
      {"steps", base.steps},
      {"beta", base.beta},
      {"lr0", base.lr0},
      {"medians", medians},
      {"orderings", orderings},
      {"strict_rsq_below_ptq", summary.strict_rsq_below_ptq},
      {"passed", summary.passed()},
      {"reports", runs},
  };
  return j.dump(2);
}

}  // namespace winoq::rsq
