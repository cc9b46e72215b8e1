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

#include <vector>

#include <benchmark/benchmark.h>

#include "invbench/harness.hpp"
#include "invbench/solvers.hpp"

namespace invbench {
namespace {

TrialData DefaultTrial(SettingId setting) {
  return PrepareTrial(setting, 0.35, 0, SweepConfig{});
}

Regressor StartPoint(const TrialData& d) {
  Regressor r;
  r.phi = Eigen::VectorXd::Constant(d.config.dim(), 0.1);
  return r;
}

void BM_IrmObjectiveGradData(benchmark::State& state) {
  const TrialData d = DefaultTrial(SettingId::kHomConf);
  const Regressor r = StartPoint(d);
  for (auto _ : state)
    benchmark::DoNotOptimize(IrmObjectiveGrad(r, d.train, 100.0));
}
BENCHMARK(BM_IrmObjectiveGradData);

void BM_IrmProblemEvaluate(benchmark::State& state) {
  const TrialData d = DefaultTrial(SettingId::kHomConf);
  const IrmProblem problem(d.train, false);
  const Eigen::VectorXd params = StartPoint(d).Params();
  Eigen::VectorXd grad;
  for (auto _ : state)
    benchmark::DoNotOptimize(problem.Evaluate(params, 100.0, &grad));
}
BENCHMARK(BM_IrmProblemEvaluate);

void BM_ErmAnalytic(benchmark::State& state) {
  const TrialData d = DefaultTrial(SettingId::kHet);
  for (auto _ : state) benchmark::DoNotOptimize(ErmAnalytic(d.train));
}
BENCHMARK(BM_ErmAnalytic);

void BM_ErmSgd(benchmark::State& state) {
  const TrialData d = DefaultTrial(SettingId::kHet);
  const SweepConfig cfg;
  Regressor init;
  init.phi = Eigen::VectorXd::Zero(d.config.dim());
  for (auto _ : state) benchmark::DoNotOptimize(ErmSgd(d.train, cfg.sgd_hp, init));
}
BENCHMARK(BM_ErmSgd)->Unit(benchmark::kMillisecond);

void BM_TrainIrmV1(benchmark::State& state) {
  const TrialData d = DefaultTrial(SettingId::kHet);
  IrmHyperparams hp;
  hp.max_iters = static_cast<int>(state.range(0));
  const Regressor init = StartPoint(d);
  for (auto _ : state)
    benchmark::DoNotOptimize(TrainIrmV1(d.train, hp, init, false));
}
BENCHMARK(BM_TrainIrmV1)->Arg(1000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_RunTrial(benchmark::State& state) {
  const SweepConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(RunTrial(SettingId::kHetConf, 0.35, 0, cfg));
}
BENCHMARK(BM_RunTrial)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace invbench

BENCHMARK_MAIN();
