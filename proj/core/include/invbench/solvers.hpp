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

#ifndef INVBENCH_SOLVERS_HPP_
#define INVBENCH_SOLVERS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "invbench/scm_env.hpp"

namespace invbench {

// Linear predictor over (Z1 || Z2), with an optional intercept.
struct Regressor {
  Eigen::VectorXd phi;
  std::optional<double> bias;

  // phi followed by the bias when present.
  Eigen::Index num_params() const { return phi.size() + (bias ? 1 : 0); }
  Eigen::VectorXd Params() const;
  static Regressor FromParams(const Eigen::VectorXd& params, bool with_bias);
};

struct IrmHyperparams {
  double lambda_max = 1e2;
  // lambda ramps linearly from 0 to lambda_max over this many iterations.
  int warmup_iters = 1000;
  // Fixed step, or the largest trial step when line_search is set.
  double step_size = 1e-3;
  int max_iters = 50000;
  double grad_tol = 1e-8;
  // Armijo backtracking on each gradient step (lambda held at that
  // iteration's ramp value). Off means plain fixed-step descent.
  bool line_search = true;

  void Validate() const;
};

struct SgdHyperparams {
  double step_size = 1e-3;
  int epochs = 100;
  int batch_size = 32;
  std::uint64_t shuffle_seed = 0;

  void Validate() const;
};

struct ErmOptions {
  bool fit_intercept = false;
  // Tikhonov term added to the normal equations, in units of the mean
  // squared design entry scale (X'X / N + ridge I). 0 means plain
  // least squares.
  double ridge = 0.0;
};

// (1/n) sum_i (f(x_i) - y_i)^2.
double EmpiricalRisk(const Regressor& r, const EnvDataset& ds);

// g^2 with g = d/dw R(w * f) at w = 1 = (2/n) sum_i (f(x_i) - y_i) f(x_i).
double IrmPenalty(const Regressor& r, const EnvDataset& ds);

// sum_e [ R_e(f) + lambda * penalty_e(f) ].
double IrmObjective(const Regressor& r, std::span<const EnvDataset> envs,
                    double lambda);

// Exact gradient of IrmObjective with respect to Regressor::Params().
Eigen::VectorXd IrmObjectiveGrad(const Regressor& r,
                                 std::span<const EnvDataset> envs,
                                 double lambda);

// Per-environment sufficient statistics. Risk and penalty of a linear
// predictor depend on the data only through (X'X/n, X'y/n, y'y/n), so the
// trainer iterates in O(d^2) per environment instead of O(n d).
class IrmProblem {
 public:
  struct Terms {
    double risk_sum = 0.0;
    double penalty_sum = 0.0;
    double objective = 0.0;
  };

  IrmProblem(std::span<const EnvDataset> envs, bool with_bias);

  Eigen::Index num_params() const { return num_params_; }
  std::size_t num_envs() const { return gram_.size(); }

  // Objective terms at `params`; fills `grad` when it is non-null.
  Terms Evaluate(const Eigen::VectorXd& params, double lambda,
                 Eigen::VectorXd* grad) const;

 private:
  Eigen::Index num_params_ = 0;
  std::vector<Eigen::MatrixXd> gram_;
  std::vector<Eigen::VectorXd> xty_;
  std::vector<double> yty_;
};

struct IrmTraceRow {
  int iteration = 0;
  double lambda = 0.0;
  double objective = 0.0;
  double risk_sum = 0.0;
  double penalty_sum = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;  // step taken from this iterate (0 on the last row)
};

struct IrmFit {
  Regressor regressor;
  int iterations = 0;  // gradient steps taken
  bool converged = false;
  // Line search could not decrease the objective any further.
  bool stalled = false;
  std::vector<IrmTraceRow> trace;
};

// Full-batch gradient descent on IrmObjective with the linear lambda ramp.
// Stops at max_iters or once the gradient norm drops below grad_tol. Fits an
// intercept iff `init` carries one. Throws Error(kNonFiniteObjective) if the
// iterate diverges.
IrmFit TrainIrmV1(std::span<const EnvDataset> envs, const IrmHyperparams& hp,
                  const Regressor& init, bool record_trace = false);

// Pooled least squares over all environments via Householder QR of the
// stacked design. Throws Error(kSingularDesign) when cond(X'X) > 1e12.
Regressor ErmAnalytic(std::span<const EnvDataset> envs,
                      const ErmOptions& options = {});

// Mini-batch SGD on the pooled squared loss; every epoch reshuffles with a
// stream seeded from hp.shuffle_seed. Fits an intercept iff `init` has one.
Regressor ErmSgd(std::span<const EnvDataset> envs, const SgdHyperparams& hp,
                 const Regressor& init);

}  // namespace invbench

#endif  // INVBENCH_SOLVERS_HPP_
