// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "json.hpp"
#include "winoq/fake_quant.hpp"

namespace winoq::rsq {
namespace {

double clip(double r, double limit) { return std::clamp(r, -limit, limit); }

struct Point {
  std::vector<double> v;
  std::vector<double> up;
  std::vector<double> residual;  // frozen rounding residual per element
  double s = 1.0;
  int T_s = 42;
};

double surrogate_q(const Point& p, std::size_t i, double v, double s) {
  return s * (clip(v / s, p.T_s) + p.residual[i]);
}

double surrogate_fq(const Point& p, const std::vector<double>& v, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += p.up[i] * surrogate_q(p, i, v[i], s);
  return acc;
}

double surrogate_noise(const Point& p, const std::vector<double>& v, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double e = surrogate_q(p, i, v[i], s) - v[i];
    acc += e * e;
  }
  return acc / static_cast<double>(v.size());
}

bool near_kink(double r, int T_s) {
  const double a = std::abs(r);
  const double frac = a - std::floor(a);
  return std::abs(frac - 0.5) <= 0.05 || std::abs(a - T_s) <= 0.05;
}

Point sample_point(std::mt19937_64& rng) {
  Point p;
  p.T_s = std::bernoulli_distribution(0.5)(rng) ? 42 : 63;
  p.s = std::pow(10.0, std::uniform_real_distribution<double>(-3.0, 0.0)(rng));
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
  std::uniform_real_distribution<double> ratio(-1.5 * p.T_s, 1.5 * p.T_s);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double r = ratio(rng);
    while (near_kink(r, p.T_s)) r = ratio(rng);
    const double v = r * p.s;
    p.v.push_back(v);
    p.up.push_back(gauss(rng));
    const double c = clip(v / p.s, p.T_s);
    p.residual.push_back(std::round(c) - c);
  }
  return p;
}

void record(QuantityCheck& q, double analytic, double numeric, const GradcheckConfig& cfg) {
  const double diff = std::abs(analytic - numeric);
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  const double rel = scale > 0.0 ? diff / scale : 0.0;
  ++q.checked;
  if (diff > cfg.tolerance * scale + cfg.abs_floor) {
    ++q.failures;
  }
  if (diff > cfg.abs_floor) q.max_rel_err = std::max(q.max_rel_err, rel);
}

template <typename F>
double d_dv(F&& f, const Point& p, std::size_t i, double h) {
  std::vector<double> plus = p.v;
  std::vector<double> minus = p.v;
  plus[i] += h;
  minus[i] -= h;
  return (f(plus, p.s) - f(minus, p.s)) / (2.0 * h);
}

template <typename F>
double d_ds(F&& f, const Point& p, double h) {
  return (f(p.v, p.s + h) - f(p.v, p.s - h)) / (2.0 * h);
}

}  // namespace

const char* to_string(GradQuantity q) {
  switch (q) {
    case GradQuantity::kFqGradV: return "fq_grad_v";
    case GradQuantity::kFqGradS: return "fq_grad_s";
    case GradQuantity::kNoiseGradV: return "noise_grad_v";
    case GradQuantity::kNoiseGradS: return "noise_grad_s";
  }
  return "unknown";
}

bool GradcheckReport::passed() const {
  for (const auto& q : quantities) {
    if (q.failures > 0) return false;
  }
  return sign_violations == 0;
}

GradcheckReport run_gradcheck(const GradcheckConfig& cfg) {
  GradcheckReport report;
  report.config = cfg;
  std::mt19937_64 rng(cfg.seed);

  for (std::size_t n = 0; n < cfg.points; ++n) {
    const Point p = sample_point(rng);
    const double h_v = 1e-3 * p.s;
    const double h_s = 1e-5 * p.s;
    auto fq = [&p](const std::vector<double>& v, double s) { return surrogate_fq(p, v, s); };
    auto noise = [&p](const std::vector<double>& v, double s) { return surrogate_noise(p, v, s); };

    const auto g = fq_backward<double>(p.v, p.s, p.T_s, p.up);
    const auto ng = noise_grads<double>(p.v, p.s, p.T_s);
    for (std::size_t i = 0; i < p.v.size(); ++i) {
      record(report.quantities[0], g.grad_v[i], d_dv(fq, p, i, h_v), cfg);
      record(report.quantities[2], ng.grad_v[i], d_dv(noise, p, i, h_v), cfg);
    }
    record(report.quantities[1], g.grad_s, d_ds(fq, p, h_s), cfg);
    record(report.quantities[3], ng.grad_s, d_ds(noise, p, h_s), cfg);
  }

  for (std::size_t n = 0; n < cfg.sign_points; ++n) {
    const int T_s = std::bernoulli_distribution(0.5)(rng) ? 42 : 63;
    const double s = std::pow(10.0, std::uniform_real_distribution<double>(-3.0, 0.0)(rng));
    const double r = std::uniform_real_distribution<double>(-2.0 * T_s, 2.0 * T_s)(rng);
    const double v = r * s;
    const std::vector<double> vv{v};
    const double gv = noise_grads<double>(vv, s, T_s).grad_v[0];
    const double ratio = v / s;
    bool ok = true;
    if (ratio > T_s) {
      ok = gv > 0.0;
    } else if (ratio < -T_s) {
      ok = gv < 0.0;
    } else {
      ok = gv == 0.0;
    }
    ++report.sign_checked;
    if (!ok) ++report.sign_violations;
  }
  return report;
}

std::string to_json(const GradcheckReport& report) {
  nlohmann::json q = nlohmann::json::object();
  for (GradQuantity g : kGradQuantities) {
    const auto& c = report.at(g);
    q[to_string(g)] = {
        {"checked", c.checked}, {"failures", c.failures}, {"max_rel_err", c.max_rel_err}};
  }
  nlohmann::json j = {
      {"seed", report.config.seed},
      {"points", report.config.points},
      {"tolerance", report.config.tolerance},
      {"abs_floor", report.config.abs_floor},
      {"quantities", q},
      {"sign_checked", report.sign_checked},
      {"sign_violations", report.sign_violations},
      {"passed", report.passed()},
  };
  return j.dump(2);
}

}  // namespace winoq::rsq
