// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "winoq/tensor_io.hpp"
#include "winoq/winograd.hpp"

namespace winoq::cli {
namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kUsage);
  EXPECT_EQ(run_cli({"bench", "--reps", "0"}).code, kUsage);
  EXPECT_EQ(run_cli({"verify", "--inject-fault", "bogus"}).code, kUsage);
  EXPECT_EQ(run_cli({"gradcheck", "--format", "csv"}).code, kUsage);
  EXPECT_EQ(run_cli({"--help"}).code, kSuccess);
}

TEST(Cli, VerifyExitCodes) {
  const Result ok = run_cli({"verify", "--k", "3,8,9", "--cases", "30"});
  EXPECT_EQ(ok.code, kSuccess) << ok.err;
  const auto j = nlohmann::json::parse(ok.out);
  EXPECT_TRUE(j.at("passed").get<bool>());

  const Result bad =
      run_cli({"verify", "--k", "5", "--cases", "10", "--inject-fault", "remainder-offset"});
  EXPECT_EQ(bad.code, kFailure);

  // k = 2 has no Winograd path; the suite passes trivially.
  EXPECT_EQ(run_cli({"verify", "--k", "2", "--cases", "5"}).code, kSuccess);
}

TEST(Cli, OverflowExitCodes) {
  EXPECT_EQ(run_cli({"overflow"}).code, kSuccess);
  const Result wide = run_cli({"overflow", "--act-T", "127", "--wt-T", "127", "--wt-alpha", "1"});
  EXPECT_EQ(wide.code, kFailure);
  const auto j = nlohmann::json::parse(wide.out);
  EXPECT_EQ(j.dump().find("381") != std::string::npos, true);
  EXPECT_EQ(run_cli({"overflow", "--act-T", "1", "--wt-T", "1", "--wt-alpha", "1"}).code,
            kSuccess);
}

TEST(Cli, BenchCsvCarriesTheoreticalSpeedup) {
  const Result r = run_cli({"bench", "--k", "3,7", "--c-in", "8", "--c-out", "8", "--width",
                            "40", "--reps", "3", "--warmup", "0", "--format", "csv"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("k,stride,", 0), 0u);
  const double expect[] = {theoretical_speedup(3).value(), theoretical_speedup(7).value()};
  for (double e : expect) {
    ASSERT_TRUE(std::getline(lines, line));
    std::vector<std::string> cols;
    std::istringstream row(line);
    for (std::string c; std::getline(row, c, ',');) cols.push_back(c);
    ASSERT_EQ(cols.size(), 11u);
    EXPECT_NEAR(std::stod(cols[8]), e, 1e-9);
  }
}

TEST(Cli, CalibrateFlagsDegenerateTensors) {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / "winoq_cli_const.f32";
  io::write_tensor(p, TensorF32(Shape{1, 1, 64}, 0.5f));
  const Result r = run_cli({"calibrate", p.string()});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("reports")[0].at("fallback").get<bool>());
  fs::remove(p);
  fs::remove(io::sidecar_path(p));

  const Result missing = run_cli({"calibrate", (fs::temp_directory_path() / "nope.f32").string()});
  EXPECT_EQ(missing.code, kUsage);
  EXPECT_NE(missing.err.find("winoq:"), std::string::npos);
}

TEST(Cli, GradcheckExitCodes) {
  EXPECT_EQ(run_cli({"gradcheck", "--points", "100", "--sign-points", "100"}).code, kSuccess);
  EXPECT_EQ(run_cli({"gradcheck", "--points", "100", "--sign-points", "100", "--tol", "1e-14"})
                .code,
            kFailure);
}

TEST(Cli, TrainDemoWarnsOnFewSeedsAndIsDeterministic) {
  const std::vector<std::string> args = {"train-demo", "--seeds", "1", "--steps", "5"};
  const Result a = run_cli(args);
  const Result b = run_cli(args);
  EXPECT_NE(a.err.find("warning"), std::string::npos);
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_TRUE(j.at("low_confidence").get<bool>());
  EXPECT_TRUE(j.contains("deploy_check"));
}

}  // namespace
}  // namespace winoq::cli
