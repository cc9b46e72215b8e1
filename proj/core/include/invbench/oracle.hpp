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

#ifndef INVBENCH_ORACLE_HPP_
#define INVBENCH_ORACLE_HPP_

#include <span>

#include <Eigen/Dense>

#include "invbench/scm_env.hpp"
#include "invbench/solvers.hpp"

namespace invbench {

// Averaged second-moment matrices above this condition number are treated
// as singular.
inline constexpr double kMaxConditionNumber = 1e12;
// Diagonal jitter a caller may add to retry a singular solve.
inline constexpr double kDiagonalJitter = 1e-8;

// Exact second moments of one environment. The SEM is zero-mean, so these
// are both raw moments and covariances.
struct PopulationMoments {
  Eigen::MatrixXd sigma_xx;  // E[x x'], x = (Z1 || Z2)
  Eigen::VectorXd sigma_xy;  // E[x y]
  double var_y = 0.0;        // Var(Y)
};

// Propagates the independent standard-normal sources (H, Z1 noise, Y noise,
// Z2 noise) through the SEM as a loading matrix L, so that
// Cov(Z1, Y, Z2) = L L'. No sampling.
PopulationMoments ComputePopulationMoments(const GroundTruth& gt,
                                           const ScmConfig& config,
                                           double scale);

// 2-norm condition number of a symmetric matrix; +inf if it is not
// positive definite.
double SymmetricConditionNumber(const Eigen::MatrixXd& m);

// argmin_phi of the environment-averaged population squared error,
// (mean_e Sxx_e + jitter I)^-1 (mean_e Sxy_e): the infinite-sample limit of
// pooled ERM. Throws Error(kSingularCovariance) when the conditioned matrix
// exceeds kMaxConditionNumber.
Regressor PooledPopulationRegressor(const GroundTruth& gt,
                                    const ScmConfig& config,
                                    std::span<const double> scales,
                                    double jitter = 0.0);

}  // namespace invbench

#endif  // INVBENCH_ORACLE_HPP_
