// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "winoq/bench.hpp"
#include "winoq/calibration.hpp"
#include "winoq/checkpoint.hpp"
#include "winoq/equivalence.hpp"
#include "winoq/experiment.hpp"
#include "winoq/gradcheck.hpp"
#include "winoq/tensor_io.hpp"

namespace winoq::cli {
namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemeFlags {
  int act_T = 63;
  double act_alpha = 1.0;
  int wt_T = 63;
  double wt_alpha = 1.5;
  int bits = 8;

  QuantScheme act() const { return make_scheme(bits, act_T, act_alpha); }
  QuantScheme wt() const { return make_scheme(bits, wt_T, wt_alpha); }
};

struct CommonFlags {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

// Acoustic-model operator shapes: (k, stride, c_in, c_out), input length 150.
struct ShapeRow {
  std::size_t k, stride, c_in, c_out;
};
constexpr ShapeRow kReferenceShapes[] = {
    {3, 1, 128, 512},  {3, 1, 128, 768},  {3, 1, 128, 1024}, {15, 1, 128, 128},
    {9, 1, 256, 512},  {13, 1, 512, 512}, {15, 1, 512, 512},
};

class Session {
 public:
  Session(const CommonFlags& common, std::ostream& out, std::ostream& err)
      : common_(common), out_(out), err_(err) {}

  std::ostream& status() { return common_.out.empty() ? err_ : out_; }
  std::ostream& warn() { return err_; }

  void emit(const std::string& report) {
    if (common_.out.empty()) {
      out_ << report << "\n";
      return;
    }
    std::ofstream f(common_.out);
    if (!f) fail(ErrorCode::kIo, "cannot open report file " + common_.out);
    f << report << "\n";
    if (!f) fail(ErrorCode::kIo, "failed writing report file " + common_.out);
    status() << "report written to " << common_.out << "\n";
  }

 private:
  const CommonFlags& common_;
  std::ostream& out_;
  std::ostream& err_;
};

void require_json(const CommonFlags& c, const char* command) {
  if (c.format != "json") {
    throw UsageError(std::string("--format ") + c.format + " is not supported by " + command);
  }
}

std::vector<std::size_t> default_kernels() {
  std::vector<std::size_t> ks;
  for (std::size_t k = 3; k <= 16; ++k) ks.push_back(k);
  return ks;
}

void add_common(CLI::App* app, CommonFlags& c) {
  app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  app->add_option("--out", c.out, "Write the report to this file");
  app->add_option("--format", c.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

void add_schemes(CLI::App* app, SchemeFlags& s) {
  app->add_option("--act-T", s.act_T, "Activation base range T")->capture_default_str();
  app->add_option("--act-alpha", s.act_alpha, "Activation range scale alpha")
      ->capture_default_str();
  app->add_option("--wt-T", s.wt_T, "Weight base range T")->capture_default_str();
  app->add_option("--wt-alpha", s.wt_alpha, "Weight range scale alpha")->capture_default_str();
  app->add_option("--bits", s.bits, "Storage bit width")->capture_default_str();
}

// verify

struct VerifyFlags {
  std::vector<std::size_t> ks;
  std::size_t cases = 1000;
  std::string fault = "none";
};

int cmd_verify(Session& s, const CommonFlags& c, const SchemeFlags& sf, const VerifyFlags& f) {
  require_json(c, "verify");
  EquivalenceConfig cfg;
  cfg.kernel_sizes = f.ks.empty() ? default_kernels() : f.ks;
  cfg.cases_per_kernel = f.cases;
  cfg.seed = c.seed;
  cfg.act_scheme = sf.act();
  cfg.wt_scheme = sf.wt();
  if (f.fault == "remainder-offset") cfg.fault = PlanFault::kRemainderOffsetMinusOne;

  const EquivalenceSummary summary = run_equivalence_suite(cfg);
  for (const auto& k : summary.kernels) {
    s.status() << "k=" << std::setw(2) << k.k << " path=" << to_string(k.path)
               << " cases=" << k.cases << " mismatched=" << k.mismatched_cases
               << (k.path == ConvPath::kWinograd ? "" : " (plain INT8, trivially exact)")
               << (k.passed() ? "  PASS" : "  FAIL") << "\n";
    if (k.first_divergence) {
      s.status() << "  first divergence: " << to_string(*k.first_divergence) << "\n";
    }
  }
  s.emit(to_json(summary, cfg));
  return summary.passed() ? kSuccess : kFailure;
}

// overflow

int cmd_overflow(Session& s, const CommonFlags& c, const SchemeFlags& sf) {
  require_json(c, "overflow");
  const QuantScheme act = sf.act();
  const QuantScheme wt = sf.wt();
  const OverflowReport r = check_overflow(act, wt);
  s.status() << "act " << to_string(act) << " -> max " << r.max_transformed_act << ", wt "
             << to_string(wt) << " -> max " << r.max_transformed_wt << ", storage limit "
             << r.storage_limit << (r.fits() ? ": fits" : ": OVERFLOWS") << "\n";
  s.emit(to_json(r, act, wt));
  return r.fits() ? kSuccess : kFailure;
}

// bench

struct BenchFlags {
  std::vector<std::size_t> ks;
  std::size_t stride = 1;
  std::size_t c_in = 64;
  std::size_t c_out = 64;
  std::size_t width = 150;
  std::size_t reps = 10;
  std::size_t warmup = 2;
  int threads = 1;
  bool reference_shapes = false;
};

int cmd_bench(Session& s, const CommonFlags& c, const SchemeFlags& sf, const BenchFlags& f) {
  if (f.reps == 0) throw UsageError("--reps must be positive");
  if (f.threads < 1) throw UsageError("--threads must be positive");
  struct Row {
    std::size_t k, stride, c_in, c_out;
  };
  std::vector<Row> rows;
  if (f.reference_shapes) {
    for (const auto& t : kReferenceShapes) rows.push_back({t.k, t.stride, t.c_in, t.c_out});
  } else {
    for (std::size_t k : f.ks.empty() ? default_kernels() : f.ks) {
      rows.push_back({k, f.stride, f.c_in, f.c_out});
    }
  }
  BenchOptions opts;
  opts.repetitions = f.reps;
  opts.warmup = f.warmup;
  opts.threads = f.threads;
  opts.seed = c.seed;

  std::vector<BenchReport> reports;
  for (const auto& row : rows) {
    const Conv1DPlan plan = plan_conv1d(row.k, row.stride, sf.act(), sf.wt());
    reports.push_back(bench_kernel(plan, BenchShape{row.c_in, row.c_out, f.width, 1}, opts));
    const auto& r = reports.back();
    s.status() << "k=" << r.k << " s=" << r.stride << " c_in=" << r.c_in << " c_out=" << r.c_out
               << " w=" << r.width << std::fixed << std::setprecision(3)
               << "  gemm " << r.gemm_ns / 1e6 << " ms  wino " << r.wino_ns / 1e6
               << " ms  measured " << r.speedup_measured << "x  theory "
               << r.speedup_theoretical << "x\n"
               << std::defaultfloat;
  }
  std::ostringstream os;
  if (c.format == "csv") {
    os << bench_csv_header();
    for (const auto& r : reports) os << "\n" << to_csv_row(r);
  } else {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(json::parse(to_json(r)));
    json j = {{"seed", c.seed},       {"repetitions", f.reps}, {"warmup", f.warmup},
              {"threads", f.threads}, {"reports", arr}};
    os << j.dump(2);
  }
  s.emit(os.str());
  return kSuccess;
}

// calibrate

struct CalibrateFlags {
  std::vector<std::string> inputs;
  std::string role = "act";
  std::size_t bins = kDefaultHistogramBins;
};

int cmd_calibrate(Session& s, const CommonFlags& c, const SchemeFlags& sf,
                  const CalibrateFlags& f) {
  require_json(c, "calibrate");
  if (f.bins == 0) throw UsageError("--bins must be positive");
  const QuantScheme scheme = f.role == "wt" ? sf.wt() : sf.act();
  json reports = json::array();
  for (const auto& path : f.inputs) {
    const TensorF32 t = io::read_tensor_f32(path);
    const KlCalibration kl = kl_calibrate(build_histogram(t, f.bins), scheme);
    CalibrationReport klr{path, CalibrationMethod::kKl, kl.scale, scheme.T_s(),
                          scheme.alpha(), f.bins, kl.fell_back};
    CalibrationReport mm{path, CalibrationMethod::kMinMax, minmax_scale(t, scheme),
                         scheme.T_s(), scheme.alpha(), f.bins, false};
    reports.push_back(json::parse(to_json(klr)));
    reports.push_back(json::parse(to_json(mm)));
    s.status() << path << ": kl scale " << kl.scale << " (threshold " << kl.threshold << ")"
               << (kl.fell_back ? " [min-max fallback]" : "") << ", minmax scale " << mm.scale
               << "\n";
  }
  json j = {{"role", f.role}, {"bins", f.bins}, {"reports", reports}};
  s.emit(j.dump(2));
  return kSuccess;
}

// gradcheck

int cmd_gradcheck(Session& s, const CommonFlags& c, rsq::GradcheckConfig cfg) {
  require_json(c, "gradcheck");
  if (!(cfg.tolerance > 0.0)) throw UsageError("--tol must be positive");
  cfg.seed = c.seed;
  const rsq::GradcheckReport r = rsq::run_gradcheck(cfg);
  for (rsq::GradQuantity q : rsq::kGradQuantities) {
    const auto& qc = r.at(q);
    s.status() << std::left << std::setw(14) << rsq::to_string(q) << std::right
               << " checked " << qc.checked << " failures " << qc.failures << " max rel err "
               << qc.max_rel_err << "\n";
  }
  s.status() << "noise grad_v sign structure: " << r.sign_violations << " violations in "
             << r.sign_checked << " points\n";
  s.status() << (r.passed() ? "PASS" : "FAIL") << " at tolerance " << cfg.tolerance << "\n";
  s.emit(to_json(r));
  return r.passed() ? kSuccess : kFailure;
}

// train-demo

struct TrainFlags {
  std::size_t seeds = 30;
  std::size_t steps = 300;
  double beta = 0.25;
  double lr = 0.005;
  double deploy_tol = 1e-4;
  std::string checkpoint;
};

int cmd_train_demo(Session& s, const CommonFlags& c, const TrainFlags& f) {
  require_json(c, "train-demo");
  if (f.seeds == 0) throw UsageError("--seeds must be positive");
  if (f.seeds < 5) {
    s.warn() << "warning: " << f.seeds
             << " seed(s); the median ordering verdict is low-confidence\n";
  }
  rsq::ExperimentConfig cfg;
  cfg.first_seed = c.seed;
  cfg.seeds = f.seeds;
  cfg.base.steps = f.steps;
  cfg.base.beta = f.beta;
  cfg.base.lr0 = f.lr;
  cfg.base.validate();

  const rsq::ExperimentSummary summary = rsq::run_experiment(cfg);
  for (const auto& run : summary.runs) {
    s.status() << "seed " << run.seed;
    for (rsq::Mode m : rsq::kExperimentModes) {
      s.status() << "  " << rsq::to_string(m) << " " << run.at(m).final_output_mse;
    }
    s.status() << "\n";
  }
  s.status() << "median";
  for (rsq::Mode m : rsq::kExperimentModes) {
    s.status() << "  " << rsq::to_string(m) << " " << summary.median(m);
  }
  s.status() << "\n";
  for (const auto& o : summary.orderings) {
    s.status() << (o.passed ? "PASS " : "FAIL ") << o.name << " (" << o.lhs << " vs " << o.rhs
               << ")\n";
  }
  s.status() << "rsq < ptq strictly in " << summary.strict_rsq_below_ptq << "/"
             << summary.runs.size() << " seeds\n";

  json deploys = json::array();
  bool deploy_ok = true;
  for (const auto& run : summary.runs) {
    const auto& student = run.at(rsq::Mode::kRsq).student;
    const TensorF32 probe = rsq::deploy_probe(student, run.seed, cfg.base);
    try {
      const rsq::DeployReport d = rsq::deploy_check(student, probe, f.deploy_tol);
      json dj = json::parse(to_json(d));
      dj["seed"] = run.seed;
      deploys.push_back(dj);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDeploymentMismatch) throw;
      deploy_ok = false;
      deploys.push_back({{"seed", run.seed}, {"passed", false}, {"error", e.what()}});
      s.status() << "deploy_check seed " << run.seed << ": " << e.what() << "\n";
    }
  }
  s.status() << (deploy_ok ? "PASS" : "FAIL") << " deploy_check on " << summary.runs.size()
             << " RSQ students\n";
  if (!f.checkpoint.empty()) {
    rsq::save_checkpoint(summary.runs.front().at(rsq::Mode::kRsq).student, f.checkpoint);
    s.status() << "checkpoint of seed " << summary.runs.front().seed << " RSQ student written to "
               << f.checkpoint << "\n";
  }

  json j = json::parse(to_json(summary));
  j["deploy_check"] = deploys;
  j["deploy_tolerance"] = f.deploy_tol;
  j["low_confidence"] = f.seeds < 5;
  s.emit(j.dump(2));
  return summary.passed() && deploy_ok ? kSuccess : kFailure;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kPrecondition:
    case ErrorCode::kInvalidScheme:
    case ErrorCode::kInvalidShape:
    case ErrorCode::kDomain:
      return kUsage;
    default:
      return kFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantized Winograd Conv1D toolkit", "winoq"};
  app.require_subcommand(1);

  CommonFlags common;
  SchemeFlags schemes;
  VerifyFlags verify;
  BenchFlags bench;
  CalibrateFlags calibrate;
  rsq::GradcheckConfig gradcheck;
  TrainFlags train;

  auto* v = app.add_subcommand("verify", "INT8 Winograd vs INT8 GEMM bit-exactness suite");
  add_common(v, common);
  add_schemes(v, schemes);
  v->add_option("--k", verify.ks, "Kernel sizes (default 3..16)")->delimiter(',');
  v->add_option("--cases", verify.cases, "Random cases per kernel size")->capture_default_str();
  v->add_option("--inject-fault", verify.fault, "Corrupt the plan to exercise the suite")
      ->check(CLI::IsMember({"none", "remainder-offset"}))
      ->capture_default_str();

  auto* o = app.add_subcommand("overflow", "Winograd transform range analysis");
  add_common(o, common);
  add_schemes(o, schemes);

  auto* b = app.add_subcommand("bench", "Time INT8 GEMM against INT8 Winograd");
  add_common(b, common);
  add_schemes(b, schemes);
  b->add_option("--k", bench.ks, "Kernel sizes (default 3..16)")->delimiter(',');
  b->add_option("--stride", bench.stride, "Convolution stride")->capture_default_str();
  b->add_option("--c-in", bench.c_in, "Input channels")->capture_default_str();
  b->add_option("--c-out", bench.c_out, "Output channels")->capture_default_str();
  b->add_option("--width", bench.width, "Input length")->capture_default_str();
  b->add_option("--reps", bench.reps, "Timed repetitions")->capture_default_str();
  b->add_option("--warmup", bench.warmup, "Warm-up repetitions")->capture_default_str();
  b->add_option("--threads", bench.threads, "Threads for the timed operators")
      ->envname("WINOQ_THREADS")
      ->capture_default_str();
  b->add_flag("--reference-shapes", bench.reference_shapes, "Time the reference acoustic-model shapes");

  auto* cal = app.add_subcommand("calibrate", "KL and min-max scales for tensor files");
  add_common(cal, common);
  add_schemes(cal, schemes);
  cal->add_option("inputs", calibrate.inputs, "Tensor files (raw f32 + .json sidecar)")
      ->required();
  cal->add_option("--role", calibrate.role, "Calibrate with the activation or weight scheme")
      ->check(CLI::IsMember({"act", "wt"}))
      ->capture_default_str();
  cal->add_option("--bins", calibrate.bins, "Histogram bins")->capture_default_str();

  auto* g = app.add_subcommand("gradcheck", "Finite-difference check of the quantizer gradients");
  add_common(g, common);
  g->add_option("--tol", gradcheck.tolerance, "Relative tolerance")->capture_default_str();
  g->add_option("--points", gradcheck.points, "Sampled points")->capture_default_str();
  g->add_option("--sign-points", gradcheck.sign_points, "Sign-structure points")
      ->capture_default_str();

  auto* t = app.add_subcommand("train-demo", "PTQ / RSQ-without-MSE / RSQ on the toy task");
  add_common(t, common);
  t->add_option("--seeds", train.seeds, "Number of consecutive seeds from --seed")
      ->capture_default_str();
  t->add_option("--steps", train.steps, "Fine-tuning steps")->capture_default_str();
  t->add_option("--beta", train.beta, "Noise-loss weight for RSQ")->capture_default_str();
  t->add_option("--lr", train.lr, "Initial learning rate")->capture_default_str();
  t->add_option("--deploy-tol", train.deploy_tol, "deploy_check relative tolerance")
      ->capture_default_str();
  t->add_option("--checkpoint", train.checkpoint, "Save the first RSQ student here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }

  Session session(common, out, err);
  try {
    if (*v) return cmd_verify(session, common, schemes, verify);
    if (*o) return cmd_overflow(session, common, schemes);
    if (*b) return cmd_bench(session, common, schemes, bench);
    if (*cal) return cmd_calibrate(session, common, schemes, calibrate);
    if (*g) return cmd_gradcheck(session, common, gradcheck);
    if (*t) return cmd_train_demo(session, common, train);
  } catch (const UsageError& e) {
    err << "winoq: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "winoq: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return kUsage;
}

}  // namespace winoq::cli
