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

#include "invbench/oracle.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "invbench/errors.hpp"

namespace invbench {

PopulationMoments ComputePopulationMoments(const GroundTruth& gt,
                                           const ScmConfig& config,
                                           double scale) {
  config.Validate();
  if (!(scale > 0.0))
    throw Error(ErrorCode::kInvalidConfig, "environment scale must be > 0");

  const int d1 = gt.d1();
  const int d2 = gt.d2();
  const int dh = gt.dh();
  if (d1 != config.d1 || d2 != config.d2)
    throw Error(ErrorCode::kDimensionMismatch,
                "ground truth does not match config dimensions");
  const NoiseLevels noise = EnvironmentNoise(config, scale);

  // Source layout: [u_H (dh) | u_1 (d1) | u_y (1) | u_2 (d2)].
  const int h0 = 0;
  const int z10 = dh;
  const int y0 = dh + d1;
  const int z20 = dh + d1 + 1;
  const int m = dh + d1 + 1 + d2;

  Eigen::MatrixXd load_z1 = Eigen::MatrixXd::Zero(d1, m);
  if (dh > 0) load_z1.middleCols(h0, dh) = scale * gt.w_h1;
  load_z1.middleCols(z10, d1).diagonal().setConstant(scale);

  Eigen::RowVectorXd load_y = gt.w_1y.transpose() * load_z1;
  if (dh > 0) load_y.segment(h0, dh) += scale * gt.w_hy.transpose();
  load_y[y0] += noise.target;

  Eigen::MatrixXd load_z2 = gt.w_y2 * load_y;
  if (dh > 0) load_z2.middleCols(h0, dh) += scale * gt.w_h2;
  load_z2.middleCols(z20, d2).diagonal().array() += noise.spurious;

  Eigen::MatrixXd load_x(d1 + d2, m);
  load_x.topRows(d1) = load_z1;
  load_x.bottomRows(d2) = load_z2;

  PopulationMoments pm;
  pm.sigma_xx = load_x * load_x.transpose();
  // Exact symmetry; the product is symmetric only up to rounding.
  pm.sigma_xx = 0.5 * (pm.sigma_xx + pm.sigma_xx.transpose()).eval();
  pm.sigma_xy = load_x * load_y.transpose();
  pm.var_y = load_y.squaredNorm();
  return pm;
}

double SymmetricConditionNumber(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  if (ev.size() == 0) return std::numeric_limits<double>::infinity();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Regressor PooledPopulationRegressor(const GroundTruth& gt,
                                    const ScmConfig& config,
                                    std::span<const double> scales,
                                    double jitter) {
  if (scales.empty())
    throw Error(ErrorCode::kInvalidConfig, "at least one scale is required");

  const int d = gt.d1() + gt.d2();
  Eigen::MatrixXd sxx = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd sxy = Eigen::VectorXd::Zero(d);
  for (double e : scales) {
    const PopulationMoments pm = ComputePopulationMoments(gt, config, e);
    sxx += pm.sigma_xx;
    sxy += pm.sigma_xy;
  }
  const double inv = 1.0 / static_cast<double>(scales.size());
  sxx *= inv;
  sxy *= inv;
  if (jitter > 0.0) sxx.diagonal().array() += jitter;

  const double cond = SymmetricConditionNumber(sxx);
  if (!(cond <= kMaxConditionNumber)) {
    std::ostringstream msg;
    msg << "averaged population covariance has condition number " << cond
        << " (limit " << kMaxConditionNumber << ")";
    throw Error(ErrorCode::kSingularCovariance, msg.str());
  }
  Regressor r;
  r.phi = sxx.ldlt().solve(sxy);
  return r;
}

}  // namespace invbench
