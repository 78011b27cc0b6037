// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace winoq {
namespace {

template <typename Fn>
double median_ns(Fn&& fn, std::size_t warmup, std::size_t reps) {
  for (std::size_t i = 0; i < warmup; ++i) fn();
  std::vector<double> samples;
  samples.reserve(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

TensorI8 random_values(Shape shape, int T_s, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(-T_s, T_s);
  TensorI8 t(shape, std::int8_t{0});
  for (auto& v : t.data()) v = static_cast<std::int8_t>(dist(rng));
  return t;
}

}  // namespace

BenchReport bench_kernel(const Conv1DPlan& plan, const BenchShape& shape,
                         const BenchOptions& options) {
  if (options.repetitions < 3) {
    fail(ErrorCode::kPrecondition, "bench needs at least 3 repetitions");
  }
  std::mt19937_64 rng(options.seed);
  const Padding pad = plan.stride == 1 ? same_padding(plan.k) : Padding{};
  QuantizedTensor input(random_values(Shape{shape.batch, shape.c_in, shape.width},
                                      plan.act_scheme.T_s(), rng),
                        1.0, plan.act_scheme);
  QuantizedConv1D layer{QuantizedTensor(random_values(Shape{shape.c_out, shape.c_in, plan.k},
                                                      plan.wt_scheme.T_s(), rng),
                                        1.0, plan.wt_scheme),
                        {}, plan.stride, pad};

  BenchReport r;
  r.k = plan.k;
  r.stride = plan.stride;
  r.c_in = shape.c_in;
  r.c_out = shape.c_out;
  r.width = shape.width;

  volatile std::int32_t sink = 0;
  r.gemm_ns = median_ns(
      [&] { sink = conv1d_int8_gemm(input, layer, options.threads).raw.data()[0]; },
      options.warmup, options.repetitions);
  if (plan.path == ConvPath::kWinograd) {
    r.wino_ns = median_ns(
        [&] { sink = conv1d_int8_winograd(input, layer, plan, options.threads).raw.data()[0]; },
        options.warmup, options.repetitions);
    r.speedup_theoretical = theoretical_speedup(plan.k).value();
  } else {
    r.wino_ns = median_ns(
        [&] { sink = conv1d_int8_gemm(input, layer, options.threads).raw.data()[0]; },
        options.warmup, options.repetitions);
    r.speedup_theoretical = 1.0;
  }
  (void)sink;
  r.speedup_measured = r.wino_ns > 0.0 ? r.gemm_ns / r.wino_ns : 0.0;

  const std::size_t out_w = conv_output_width(shape.width, plan.k, plan.stride, pad);
  const MultCounts counts = count_multiplications(plan, out_w, shape.c_in, shape.c_out);
  r.gemm_mults = counts.gemm_mults * shape.batch;
  r.wino_mults = counts.wino_mults * shape.batch;
  return r;
}

std::string to_json(const BenchReport& r) {
  nlohmann::json j = {
      {"k", r.k},
      {"stride", r.stride},
      {"c_in", r.c_in},
      {"c_out", r.c_out},
      {"width", r.width},
      {"gemm_ns", r.gemm_ns},
      {"wino_ns", r.wino_ns},
      {"speedup_measured", r.speedup_measured},
      {"speedup_theoretical", r.speedup_theoretical},
      {"gemm_mults", r.gemm_mults},
      {"wino_mults", r.wino_mults},
  };
  return j.dump();
}

std::string bench_csv_header() {
  return "k,stride,c_in,c_out,width,gemm_ns,wino_ns,speedup_measured,speedup_theoretical,"
         "gemm_mults,wino_mults";
}

std::string to_csv_row(const BenchReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << r.k << ',' << r.stride << ',' << r.c_in << ',' << r.c_out << ',' << r.width << ','
     << r.gemm_ns << ',' << r.wino_ns << ',' << r.speedup_measured << ','
     << r.speedup_theoretical << ',' << r.gemm_mults << ',' << r.wino_mults;
  return os.str();
}

}  // namespace winoq
