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

#ifndef INVBENCH_HARNESS_HPP_
#define INVBENCH_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "invbench/metrics.hpp"
#include "invbench/scm_env.hpp"
#include "invbench/solvers.hpp"

namespace invbench {

std::string_view Version();

// Standard deviation of the N(0, s^2) entries of the IRM starting point.
inline constexpr double kIrmInitStd = 0.1;

inline constexpr std::string_view kResultsHeader =
    "setting,noise_model,confounder,weight_std,trial,method,causal_err,"
    "noncausal_err,test_mse,seed,status";

inline constexpr std::string_view kPlotHeader =
    "method,trial,causal_err,noncausal_err,test_mse";

struct SweepConfig {
  // Template for every cell; confounder, noise_model and weight_std are
  // overwritten per (setting, arm).
  ScmConfig base;
  std::vector<double> weight_stds = {0.35, 0.1};
  std::vector<SettingId> settings = {kAllSettings.begin(), kAllSettings.end()};
  std::vector<Method> methods = {Method::kIrmV1, Method::kErmAnalytic,
                                 Method::kErmSgd};
  int trials = 20;
  IrmHyperparams irm_hp;
  SgdHyperparams sgd_hp = {.step_size = 3e-4,
                           .epochs = 300,
                           .batch_size = 64,
                           .shuffle_seed = 0};
  std::filesystem::path out_dir = "invbench_out";

  // Throws Error(kInvalidConfig). Does not touch the filesystem.
  void Validate() const;
};

// Everything one trial samples, before any solver runs.
struct TrialData {
  ScmConfig config;
  GroundTruth gt;
  std::vector<EnvDataset> train;
  // Fresh environment at the largest training scale, from its own substream.
  EnvDataset test;
  std::uint64_t seed = 0;
};

// Substream for one purpose within a trial. The weight-std arm is not part
// of the key, so arms of the same trial share their standard-normal draws
// and differ only in the ground-truth scale.
std::uint64_t TrialStreamSeed(std::uint64_t master_seed, SettingId setting,
                              int trial, std::string_view label);

TrialData PrepareTrial(SettingId setting, double weight_std, int trial,
                       const SweepConfig& cfg);

// Optional diagnostics filled by RunTrial.
struct TrialDiagnostics {
  TrialData data;
  // Regressor of every method that finished, in cfg.methods order.
  std::vector<std::pair<Method, Regressor>> fitted;
  IrmFit irm;
  bool irm_ran = false;
};

// One row per requested method. Solver errors become rows whose status is
// the error tag; nothing is thrown for them.
std::vector<TrialResult> RunTrial(SettingId setting, double weight_std,
                                  int trial, const SweepConfig& cfg,
                                  TrialDiagnostics* diagnostics = nullptr);

struct MetricStats {
  double median = 0.0;
  double mean = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct MethodSummary {
  Method method = Method::kIrmV1;
  int n_ok = 0;
  int n_failed = 0;
  MetricStats causal_err;
  MetricStats noncausal_err;
  MetricStats test_mse;
};

struct CellSummary {
  SettingId setting = SettingId::kHom;
  double weight_std = 0.0;
  std::vector<MethodSummary> methods;

  const MethodSummary* Find(Method m) const;
};

struct SweepSummary {
  std::vector<CellSummary> cells;

  const CellSummary* Find(SettingId setting, double weight_std) const;
};

// Stats over ok rows only; failed rows are counted, never averaged in.
SweepSummary Summarize(const std::vector<TrialResult>& rows,
                       const SweepConfig& cfg);

// Orders rows by (setting, arm, trial, method), following the order in which
// settings, arms and methods appear in `cfg`.
void SortResults(std::vector<TrialResult>& rows, const SweepConfig& cfg);

// "%.17g": locale-independent, round-trips every double.
std::string FormatDouble(double v);
std::string FormatResultRow(const TrialResult& row);
std::string SummaryToJson(const SweepSummary& summary, const SweepConfig& cfg);

// Worker count: INVBENCH_THREADS if set to a positive integer, else the
// hardware concurrency (at least 1).
int ResolveThreadCount();

struct SweepOutput {
  std::vector<TrialResult> rows;
  SweepSummary summary;
};

// Runs every (setting x arm x trial) cell on `threads` workers (0 means
// ResolveThreadCount()) and writes into cfg.out_dir:
//   results.csv           rows, appended as cells finish, rewritten sorted
//   summary.json          per-cell statistics plus the resolved config
//   plot_<setting>_wstd<s>.csv  plot data per (setting, arm)
// Throws Error(kIoError) when out_dir cannot be written.
SweepOutput RunSweep(const SweepConfig& cfg, int threads = 0);

}  // namespace invbench

#endif  // INVBENCH_HARNESS_HPP_
