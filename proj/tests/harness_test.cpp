// Copyright 2026 The invbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "invbench/harness.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "invbench/errors.hpp"
#include "json.hpp"

namespace invbench {
namespace {

namespace fs = std::filesystem;

fs::path ScratchDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("invbench_harness_" + std::to_string(::getpid())) /
                       name;
  fs::remove_all(dir);
  return dir;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

int FieldCount(const std::string& line) {
  return 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
}

SweepConfig SmokeConfig(const fs::path& out) {
  SweepConfig cfg;
  cfg.base.d1 = 2;
  cfg.base.d2 = 2;
  cfg.base.n_per_env = 200;
  cfg.trials = 2;
  cfg.irm_hp.max_iters = 200;
  cfg.irm_hp.warmup_iters = 100;
  cfg.sgd_hp.epochs = 20;
  cfg.out_dir = out;
  return cfg;
}

TEST(HarnessTest, TrialIsDeterministic) {
  const SweepConfig cfg = SmokeConfig("unused");
  for (SettingId s : kAllSettings) {
    const auto a = RunTrial(s, 0.35, 1, cfg);
    const auto b = RunTrial(s, 0.35, 1, cfg);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < a.size(); ++i)
      EXPECT_EQ(FormatResultRow(a[i]), FormatResultRow(b[i]));
  }
}

TEST(HarnessTest, RowsCarryCoordinates) {
  const SweepConfig cfg = SmokeConfig("unused");
  const auto rows = RunTrial(SettingId::kHetConf, 0.1, 3, cfg);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].setting, SettingId::kHetConf);
    EXPECT_EQ(rows[i].weight_std, 0.1);
    EXPECT_EQ(rows[i].trial, 3);
    EXPECT_EQ(rows[i].method, cfg.methods[i]);
    EXPECT_EQ(rows[i].seed,
              TrialStreamSeed(0, SettingId::kHetConf, 3, "trial"));
    EXPECT_TRUE(rows[i].ok()) << rows[i].status;
  }
  EXPECT_EQ(FormatResultRow(rows[0]).rfind(
                "het_conf,heteroskedastic,true,0.10000000000000001,3,IrmV1,",
                0),
            0u);
}

TEST(HarnessTest, ArmsShareNoiseButNotWeights) {
  const SweepConfig cfg = SmokeConfig("unused");
  const TrialData a = PrepareTrial(SettingId::kHom, 0.35, 0, cfg);
  const TrialData b = PrepareTrial(SettingId::kHom, 0.1, 0, cfg);
  EXPECT_TRUE(a.gt.w_1y.isApprox(b.gt.w_1y * 3.5, 1e-12));
  const TrialData c = PrepareTrial(SettingId::kHom, 0.35, 1, cfg);
  EXPECT_FALSE(a.gt.w_1y.isApprox(c.gt.w_1y));
}

TEST(HarnessTest, TestEnvironmentUsesLargestScale) {
  SweepConfig cfg = SmokeConfig("unused");
  cfg.base.env_scales = {3.0, 0.5};
  const TrialData d = PrepareTrial(SettingId::kHet, 0.35, 0, cfg);
  EXPECT_EQ(d.test.scale, 3.0);
  ASSERT_EQ(d.train.size(), 2u);
  EXPECT_NE(d.test.y[0], d.train[0].y[0]);
}

TEST(HarnessTest, SingularDesignBecomesTaggedRow) {
  SweepConfig cfg = SmokeConfig(ScratchDir("singular"));
  cfg.base.sigma_y_scale = 0.0;
  cfg.base.sigma_2_scale = 0.0;
  cfg.methods = {Method::kErmAnalytic};
  cfg.settings = {SettingId::kHom};
  const auto rows = RunTrial(SettingId::kHom, 0.35, 0, cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].status, "SingularDesign");
  EXPECT_FALSE(rows[0].ok());

  const SweepOutput out = RunSweep(cfg, 1);
  EXPECT_EQ(out.rows.size(), 4u);
  const auto* m = out.summary.Find(SettingId::kHom, 0.35)
                      ->Find(Method::kErmAnalytic);
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->n_ok, 0);
  EXPECT_EQ(m->n_failed, 2);
  const auto lines = Lines(ReadFile(cfg.out_dir / "results.csv"));
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_NE(lines[1].find("ErmAnalytic,,,,"), std::string::npos);
  EXPECT_NE(lines[1].find(",SingularDesign"), std::string::npos);
  EXPECT_EQ(FieldCount(lines[1]), 11);
  fs::remove_all(cfg.out_dir);
}

TEST(HarnessTest, SgdAgreesWithAnalyticErm) {
  SweepConfig cfg;
  cfg.methods = {Method::kErmAnalytic, Method::kErmSgd};
  for (SettingId s : kAllSettings) {
    for (int t = 0; t < 2; ++t) {
      const auto rows = RunTrial(s, 0.35, t, cfg);
      ASSERT_TRUE(rows[0].ok() && rows[1].ok());
      EXPECT_NEAR(rows[0].causal_err, rows[1].causal_err, 0.02)
          << SettingName(s) << " trial " << t;
    }
  }
}

TEST(HarnessTest, SmokeSweepWritesAllArtifacts) {
  const SweepConfig cfg = SmokeConfig(ScratchDir("smoke"));
  const SweepOutput out = RunSweep(cfg, 2);
  EXPECT_EQ(out.rows.size(), 4u * 2u * 2u * 3u);

  const auto lines = Lines(ReadFile(cfg.out_dir / "results.csv"));
  ASSERT_EQ(lines.size(), 49u);
  EXPECT_EQ(lines[0], kResultsHeader);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    EXPECT_EQ(FieldCount(lines[i]), 11) << lines[i];
    EXPECT_EQ(lines[i], FormatResultRow(out.rows[i - 1]));
  }
  EXPECT_EQ(lines[1].substr(0, 23), "hom,homoskedastic,false");

  const auto summary =
      nlohmann::json::parse(ReadFile(cfg.out_dir / "summary.json"));
  EXPECT_EQ(summary["artifact"], "invbench");
  EXPECT_EQ(summary["cells"].size(), 8u);
  EXPECT_EQ(summary["config"]["trials"], 2);
  EXPECT_EQ(summary["cells"][0]["methods"]["IrmV1"]["n_ok"], 2);

  for (SettingId s : kAllSettings) {
    for (const char* w : {"0.35", "0.1"}) {
      const fs::path p = cfg.out_dir / ("plot_" + std::string(SettingName(s)) +
                                        "_wstd" + w + ".csv");
      const auto plot = Lines(ReadFile(p));
      ASSERT_EQ(plot.size(), 7u) << p;
      EXPECT_EQ(plot[0], kPlotHeader);
    }
  }
  fs::remove_all(cfg.out_dir);
}

TEST(HarnessTest, RerunAndThreadCountAreByteIdentical) {
  SweepConfig a = SmokeConfig(ScratchDir("a"));
  SweepConfig b = SmokeConfig(ScratchDir("b"));
  SweepConfig c = SmokeConfig(ScratchDir("c"));
  RunSweep(a, 1);
  RunSweep(b, 1);
  RunSweep(c, 4);
  // summary.json embeds out_dir; compare it with that field removed.
  auto summary = [](const SweepConfig& cfg) {
    auto doc = nlohmann::json::parse(ReadFile(cfg.out_dir / "summary.json"));
    doc["config"].erase("out_dir");
    return doc.dump();
  };
  EXPECT_EQ(summary(a), summary(b));
  EXPECT_EQ(summary(a), summary(c));
  for (const char* f : {"results.csv", "plot_het_wstd0.1.csv"}) {
    const std::string ra = ReadFile(a.out_dir / f);
    EXPECT_FALSE(ra.empty());
    EXPECT_EQ(ra, ReadFile(b.out_dir / f)) << f;
    EXPECT_EQ(ra, ReadFile(c.out_dir / f)) << f;
  }
  for (const auto* p : {&a, &b, &c}) fs::remove_all(p->out_dir);
}

TEST(HarnessTest, SummaryStatistics) {
  SweepConfig cfg = SmokeConfig("unused");
  cfg.settings = {SettingId::kHom};
  cfg.weight_stds = {0.35};
  cfg.methods = {Method::kErmAnalytic};
  std::vector<TrialResult> rows;
  for (int t = 0; t < 5; ++t) {
    TrialResult r;
    r.setting = SettingId::kHom;
    r.weight_std = 0.35;
    r.trial = t;
    r.method = Method::kErmAnalytic;
    r.causal_err = t + 1.0;
    r.noncausal_err = 0.0;
    r.test_mse = 1.0;
    rows.push_back(r);
  }
  rows[4].status = "NonFiniteObjective";
  rows[4].causal_err = 1e9;
  const SweepSummary s = Summarize(rows, cfg);
  const auto* m = s.Find(SettingId::kHom, 0.35)->Find(Method::kErmAnalytic);
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->n_ok, 4);
  EXPECT_EQ(m->n_failed, 1);
  EXPECT_DOUBLE_EQ(m->causal_err.median, 2.5);
  EXPECT_DOUBLE_EQ(m->causal_err.mean, 2.5);
  EXPECT_DOUBLE_EQ(m->causal_err.q25, 1.75);
  EXPECT_DOUBLE_EQ(m->causal_err.q75, 3.25);
  EXPECT_EQ(s.Find(SettingId::kHet, 0.35), nullptr);
}

TEST(HarnessTest, SortFollowsConfigOrder) {
  SweepConfig cfg = SmokeConfig("unused");
  cfg.settings = {SettingId::kHet, SettingId::kHom};
  cfg.weight_stds = {0.1, 0.35};
  cfg.methods = {Method::kErmSgd, Method::kIrmV1};
  std::vector<TrialResult> rows;
  for (SettingId s : {SettingId::kHom, SettingId::kHet})
    for (double w : {0.35, 0.1})
      for (int t : {1, 0})
        for (Method m : {Method::kIrmV1, Method::kErmSgd}) {
          TrialResult r;
          r.setting = s;
          r.weight_std = w;
          r.trial = t;
          r.method = m;
          rows.push_back(r);
        }
  SortResults(rows, cfg);
  EXPECT_EQ(rows.front().setting, SettingId::kHet);
  EXPECT_EQ(rows.front().weight_std, 0.1);
  EXPECT_EQ(rows.front().trial, 0);
  EXPECT_EQ(rows[0].method, Method::kErmSgd);
  EXPECT_EQ(rows[1].method, Method::kIrmV1);
  EXPECT_EQ(rows.back().setting, SettingId::kHom);
  EXPECT_EQ(rows.back().weight_std, 0.35);
  EXPECT_EQ(rows.back().trial, 1);
}

TEST(HarnessTest, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -0.0}) {
    EXPECT_EQ(std::strtod(FormatDouble(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(FormatDouble(0.35), "0.34999999999999998");
}

TEST(HarnessTest, ThreadCountFromEnvironment) {
  ::setenv("INVBENCH_THREADS", "3", 1);
  EXPECT_EQ(ResolveThreadCount(), 3);
  for (const char* bad : {"0", "-2", "four", "3x"}) {
    ::setenv("INVBENCH_THREADS", bad, 1);
    EXPECT_THROW(ResolveThreadCount(), Error) << bad;
  }
  ::unsetenv("INVBENCH_THREADS");
  EXPECT_GE(ResolveThreadCount(), 1);
}

TEST(HarnessTest, UnwritableOutputDirectory) {
  const fs::path dir = ScratchDir("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  SweepConfig cfg = SmokeConfig(dir / "file" / "out");
  try {
    RunSweep(cfg, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
  fs::remove_all(dir);
}

TEST(HarnessTest, InvalidSweepConfig) {
  SweepConfig cfg = SmokeConfig("unused");
  cfg.trials = 0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = SmokeConfig("unused");
  cfg.settings = {SettingId::kHom, SettingId::kHom};
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = SmokeConfig("unused");
  cfg.sgd_hp.batch_size = 601;
  EXPECT_THROW(cfg.Validate(), Error);
}

TEST(HarnessTest, KilledSweepLeavesOnlyCompleteRows) {
  SweepConfig cfg;
  cfg.out_dir = ScratchDir("killed");
  cfg.trials = 200;
  const pid_t pid = ::fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    try {
      RunSweep(cfg, 1);
    } catch (...) {
    }
    ::_exit(0);
  }
  const fs::path results = cfg.out_dir / "results.csv";
  // Wait for some rows, then kill mid-sweep.
  for (int i = 0; i < 400; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
    if (fs::exists(results) && Lines(ReadFile(results)).size() > 6) break;
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  ::kill(pid, SIGKILL);
  int status = 0;
  ::waitpid(pid, &status, 0);
  ASSERT_TRUE(WIFSIGNALED(status)) << "sweep finished before it was killed";

  const std::string text = ReadFile(results);
  ASSERT_FALSE(text.empty());
  EXPECT_EQ(text.back(), '\n');
  const auto lines = Lines(text);
  ASSERT_GT(lines.size(), 1u);
  EXPECT_EQ(lines[0], kResultsHeader);
  for (std::size_t i = 1; i < lines.size(); ++i)
    EXPECT_EQ(FieldCount(lines[i]), 11) << lines[i];
  EXPECT_EQ((lines.size() - 1) % 3, 0u);
  fs::remove_all(cfg.out_dir);
}

}  // namespace
}  // namespace invbench
