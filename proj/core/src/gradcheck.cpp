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

#include "invbench/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "invbench/random.hpp"
#include "invbench/scm_env.hpp"
#include "invbench/solvers.hpp"

namespace invbench {

double GradientCheckReport::worst() const {
  double w = 0.0;
  for (const auto& c : cases) w = std::max(w, c.max_rel_error);
  return w;
}

double GradientRelativeError(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1.0});
  return std::abs(analytic - numeric) / denom;
}

GradientCheckReport RunGradientChecks(std::uint64_t seed, int num_cases,
                                      double step, double tolerance) {
  GradientCheckReport report;
  report.tolerance = tolerance;
  RandomStream rng(Mix64(seed ^ HashLabel("gradcheck")));

  for (int c = 0; c < num_cases; ++c) {
    GradientCheckCase info;
    info.num_envs = 1 + static_cast<int>(rng.UniformIndex(3));
    info.samples_per_env = 2 + static_cast<int>(rng.UniformIndex(29));
    info.dim = 1 + static_cast<int>(rng.UniformIndex(6));
    info.with_bias = rng.UniformIndex(4) == 0;
    info.lambda = 10.0 * rng.Uniform();

    std::vector<EnvDataset> envs(info.num_envs);
    for (auto& e : envs) {
      e.x.resize(info.samples_per_env, info.dim);
      e.y.resize(info.samples_per_env);
      for (Eigen::Index j = 0; j < e.x.cols(); ++j)
        for (Eigen::Index i = 0; i < e.x.rows(); ++i) e.x(i, j) = rng.Normal();
      for (Eigen::Index i = 0; i < e.y.size(); ++i) e.y[i] = rng.Normal();
    }
    Regressor r;
    r.phi.resize(info.dim);
    for (Eigen::Index k = 0; k < r.phi.size(); ++k) r.phi[k] = rng.Normal();
    if (info.with_bias) r.bias = rng.Normal();

    const Eigen::VectorXd analytic = IrmObjectiveGrad(r, envs, info.lambda);
    const Eigen::VectorXd params = r.Params();
    for (Eigen::Index k = 0; k < params.size(); ++k) {
      Eigen::VectorXd plus = params;
      Eigen::VectorXd minus = params;
      plus[k] += step;
      minus[k] -= step;
      const double f_plus = IrmObjective(
          Regressor::FromParams(plus, info.with_bias), envs, info.lambda);
      const double f_minus = IrmObjective(
          Regressor::FromParams(minus, info.with_bias), envs, info.lambda);
      const double numeric = (f_plus - f_minus) / (2.0 * step);
      info.max_rel_error = std::max(
          info.max_rel_error, GradientRelativeError(analytic[k], numeric));
    }
    report.cases.push_back(info);
  }
  return report;
}

}  // namespace invbench
