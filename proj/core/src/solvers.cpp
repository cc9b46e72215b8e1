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

#include "invbench/solvers.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "invbench/errors.hpp"

namespace invbench {
namespace {

constexpr double kMaxDesignCondition = 1e12;

void CheckDims(const Regressor& r, const EnvDataset& ds) {
  if (r.phi.size() != ds.dim() || ds.x.rows() != ds.y.size()) {
    std::ostringstream msg;
    msg << "regressor has " << r.phi.size() << " weights, dataset is "
        << ds.x.rows() << "x" << ds.x.cols() << " with " << ds.y.size()
        << " targets";
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
  if (ds.size() == 0)
    throw Error(ErrorCode::kDimensionMismatch, "dataset is empty");
}

Eigen::VectorXd Predict(const Regressor& r, const EnvDataset& ds) {
  Eigen::VectorXd f = ds.x * r.phi;
  if (r.bias) f.array() += *r.bias;
  return f;
}

void CheckEnvs(std::span<const EnvDataset> envs) {
  if (envs.empty())
    throw Error(ErrorCode::kDimensionMismatch, "no environments given");
}

[[noreturn]] void NonFinite(const std::string& where, int iteration) {
  throw Error(ErrorCode::kNonFiniteObjective,
              where + " became non-finite at iteration " +
                  std::to_string(iteration) + " (step size too large?)");
}

}  // namespace

Eigen::VectorXd Regressor::Params() const {
  Eigen::VectorXd p(num_params());
  p.head(phi.size()) = phi;
  if (bias) p[phi.size()] = *bias;
  return p;
}

Regressor Regressor::FromParams(const Eigen::VectorXd& params, bool with_bias) {
  Regressor r;
  const Eigen::Index d = params.size() - (with_bias ? 1 : 0);
  r.phi = params.head(d);
  if (with_bias) r.bias = params[d];
  return r;
}

void IrmHyperparams::Validate() const {
  auto fail = [](const char* what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  if (!(lambda_max >= 0.0) || !std::isfinite(lambda_max))
    fail("irm lambda_max must be finite and >= 0");
  if (warmup_iters < 0) fail("irm warmup_iters must be >= 0");
  if (!(step_size > 0.0) || !std::isfinite(step_size))
    fail("irm step_size must be finite and > 0");
  if (max_iters < 1) fail("irm max_iters must be >= 1");
  if (!(grad_tol > 0.0)) fail("irm grad_tol must be > 0");
}

void SgdHyperparams::Validate() const {
  auto fail = [](const char* what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  if (!(step_size > 0.0) || !std::isfinite(step_size))
    fail("sgd step_size must be finite and > 0");
  if (epochs < 1) fail("sgd epochs must be >= 1");
  if (batch_size < 1) fail("sgd batch_size must be >= 1");
}

double EmpiricalRisk(const Regressor& r, const EnvDataset& ds) {
  CheckDims(r, ds);
  return (Predict(r, ds) - ds.y).squaredNorm() /
         static_cast<double>(ds.size());
}

double IrmPenalty(const Regressor& r, const EnvDataset& ds) {
  CheckDims(r, ds);
  const Eigen::VectorXd f = Predict(r, ds);
  const double g =
      2.0 * (f - ds.y).dot(f) / static_cast<double>(ds.size());
  return g * g;
}

double IrmObjective(const Regressor& r, std::span<const EnvDataset> envs,
                    double lambda) {
  CheckEnvs(envs);
  double total = 0.0;
  for (const auto& e : envs)
    total += EmpiricalRisk(r, e) + lambda * IrmPenalty(r, e);
  return total;
}

Eigen::VectorXd IrmObjectiveGrad(const Regressor& r,
                                 std::span<const EnvDataset> envs,
                                 double lambda) {
  CheckEnvs(envs);
  const Eigen::Index d = r.phi.size();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(r.num_params());
  for (const auto& e : envs) {
    CheckDims(r, e);
    const double n = static_cast<double>(e.size());
    const Eigen::VectorXd f = Predict(r, e);
    const Eigen::VectorXd resid = f - e.y;
    const double g = 2.0 * resid.dot(f) / n;
    // d/dparams of risk: (2/n) X~' r;  of g: (2/n) X~' (2f - y).
    const Eigen::VectorXd dg_dir = 2.0 * f - e.y;
    const Eigen::VectorXd combined = resid + (2.0 * lambda * g) * dg_dir;
    grad.head(d).noalias() += (2.0 / n) * (e.x.transpose() * combined);
    if (r.bias) grad[d] += (2.0 / n) * combined.sum();
  }
  return grad;
}

IrmProblem::IrmProblem(std::span<const EnvDataset> envs, bool with_bias) {
  CheckEnvs(envs);
  const Eigen::Index d = envs.front().dim();
  num_params_ = d + (with_bias ? 1 : 0);
  for (const auto& e : envs) {
    if (e.dim() != d || e.x.rows() != e.y.size() || e.size() == 0)
      throw Error(ErrorCode::kDimensionMismatch,
                  "environments have inconsistent shapes");
    const double inv_n = 1.0 / static_cast<double>(e.size());
    Eigen::MatrixXd gram(num_params_, num_params_);
    Eigen::VectorXd xty(num_params_);
    gram.topLeftCorner(d, d).noalias() = inv_n * (e.x.transpose() * e.x);
    xty.head(d).noalias() = inv_n * (e.x.transpose() * e.y);
    if (with_bias) {
      const Eigen::VectorXd col_mean = inv_n * e.x.colwise().sum().transpose();
      gram.col(d).head(d) = col_mean;
      gram.row(d).head(d) = col_mean.transpose();
      gram(d, d) = 1.0;
      xty[d] = inv_n * e.y.sum();
    }
    gram_.push_back(std::move(gram));
    xty_.push_back(std::move(xty));
    yty_.push_back(inv_n * e.y.squaredNorm());
  }
}

IrmProblem::Terms IrmProblem::Evaluate(const Eigen::VectorXd& params,
                                       double lambda,
                                       Eigen::VectorXd* grad) const {
  if (params.size() != num_params_)
    throw Error(ErrorCode::kDimensionMismatch,
                "parameter vector does not match problem size");
  Terms t;
  if (grad) grad->setZero(num_params_);
  Eigen::VectorXd g_params(num_params_);
  for (std::size_t e = 0; e < gram_.size(); ++e) {
    g_params.noalias() = gram_[e] * params;
    const double quad = params.dot(g_params);   // mean f^2
    const double cross = params.dot(xty_[e]);   // mean f y
    const double risk = quad - 2.0 * cross + yty_[e];
    const double g = 2.0 * (quad - cross);
    t.risk_sum += risk;
    t.penalty_sum += g * g;
    if (grad) {
      // grad risk = 2 (G p - b); grad g = 2 (2 G p - b).
      *grad += 2.0 * (g_params - xty_[e]) +
               (2.0 * lambda * g) * 2.0 * (2.0 * g_params - xty_[e]);
    }
  }
  t.objective = t.risk_sum + lambda * t.penalty_sum;
  return t;
}

IrmFit TrainIrmV1(std::span<const EnvDataset> envs, const IrmHyperparams& hp,
                  const Regressor& init, bool record_trace) {
  hp.Validate();
  CheckEnvs(envs);
  for (const auto& e : envs) CheckDims(init, e);

  constexpr double kArmijo = 1e-4;
  constexpr double kMinStepRatio = 1e-30;

  const bool with_bias = init.bias.has_value();
  const IrmProblem problem(envs, with_bias);
  Eigen::VectorXd params = init.Params();
  Eigen::VectorXd grad(params.size());
  Eigen::VectorXd trial(params.size());
  double step = hp.step_size;

  IrmFit fit;
  for (int it = 0; it <= hp.max_iters; ++it) {
    const double ramp =
        hp.warmup_iters > 0
            ? std::min(1.0, static_cast<double>(it) / hp.warmup_iters)
            : 1.0;
    const double lambda = hp.lambda_max * ramp;
    const IrmProblem::Terms t = problem.Evaluate(params, lambda, &grad);
    const double grad_norm = grad.norm();
    if (!std::isfinite(t.objective)) NonFinite("IRM objective", it);
    if (!std::isfinite(grad_norm)) NonFinite("IRM gradient", it);
    if (record_trace)
      fit.trace.push_back(
          {it, lambda, t.objective, t.risk_sum, t.penalty_sum, grad_norm, 0.0});
    if (grad_norm < hp.grad_tol) {
      fit.converged = true;
      break;
    }
    if (it == hp.max_iters) break;

    if (hp.line_search) {
      // Let the step grow back after a shrink, never past hp.step_size.
      step = std::min(hp.step_size, 2.0 * step);
      const double decrease = kArmijo * grad_norm * grad_norm;
      bool accepted = false;
      while (step >= kMinStepRatio * hp.step_size) {
        trial = params - step * grad;
        const double f = problem.Evaluate(trial, lambda, nullptr).objective;
        if (f <= t.objective - step * decrease) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        fit.stalled = true;
        break;
      }
      params.swap(trial);
    } else {
      params.noalias() -= step * grad;
    }
    if (record_trace) fit.trace.back().step = step;
    fit.iterations = it + 1;
  }
  fit.regressor = Regressor::FromParams(params, with_bias);
  return fit;
}

Regressor ErmAnalytic(std::span<const EnvDataset> envs,
                      const ErmOptions& options) {
  CheckEnvs(envs);
  const Eigen::Index d = envs.front().dim();
  const Eigen::Index p = d + (options.fit_intercept ? 1 : 0);
  Eigen::Index rows = 0;
  for (const auto& e : envs) {
    if (e.dim() != d || e.x.rows() != e.y.size())
      throw Error(ErrorCode::kDimensionMismatch,
                  "environments have inconsistent shapes");
    rows += e.size();
  }
  const bool ridge = options.ridge > 0.0;
  const Eigen::Index total_rows = rows + (ridge ? p : 0);
  if (total_rows < p)
    throw Error(ErrorCode::kSingularDesign,
                "fewer samples than parameters");

  Eigen::MatrixXd design(total_rows, p);
  Eigen::VectorXd target(total_rows);
  Eigen::Index offset = 0;
  for (const auto& e : envs) {
    design.block(offset, 0, e.size(), d) = e.x;
    if (options.fit_intercept) design.block(offset, d, e.size(), 1).setOnes();
    target.segment(offset, e.size()) = e.y;
    offset += e.size();
  }
  if (ridge) {
    // Appending sqrt(N * ridge) I rows turns the ridge problem into plain
    // least squares, so the same QR path applies.
    design.bottomRows(p).setZero();
    design.bottomRows(p).diagonal().setConstant(
        std::sqrt(static_cast<double>(rows) * options.ridge));
    target.tail(p).setZero();
  }

  Eigen::HouseholderQR<Eigen::Ref<Eigen::MatrixXd>> qr(design);
  const Eigen::MatrixXd r_factor =
      qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const Eigen::VectorXd sv =
      Eigen::JacobiSVD<Eigen::MatrixXd>(r_factor).singularValues();
  const double smin = sv.minCoeff();
  const double cond_gram =
      smin > 0.0 ? (sv.maxCoeff() / smin) * (sv.maxCoeff() / smin)
                 : std::numeric_limits<double>::infinity();
  if (!(cond_gram <= kMaxDesignCondition)) {
    std::ostringstream msg;
    msg << "pooled design is rank deficient: cond(X'X) = " << cond_gram;
    throw Error(ErrorCode::kSingularDesign, msg.str());
  }

  const Eigen::VectorXd params = qr.solve(target);
  return Regressor::FromParams(params, options.fit_intercept);
}

Regressor ErmSgd(std::span<const EnvDataset> envs, const SgdHyperparams& hp,
                 const Regressor& init) {
  hp.Validate();
  CheckEnvs(envs);
  for (const auto& e : envs) CheckDims(init, e);

  // Pooled sample index as (environment, row).
  std::vector<std::pair<std::uint32_t, std::uint32_t>> index;
  for (std::size_t e = 0; e < envs.size(); ++e)
    for (Eigen::Index i = 0; i < envs[e].size(); ++i)
      index.emplace_back(static_cast<std::uint32_t>(e),
                         static_cast<std::uint32_t>(i));
  if (static_cast<std::size_t>(hp.batch_size) > index.size())
    throw Error(ErrorCode::kInvalidConfig,
                "sgd batch_size exceeds pooled sample count");

  const Eigen::Index d = init.phi.size();
  Eigen::VectorXd phi = init.phi;
  double bias = init.bias.value_or(0.0);
  const bool with_bias = init.bias.has_value();

  RandomStream rng(hp.shuffle_seed);
  Eigen::VectorXd grad(d);
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    for (std::size_t i = index.size() - 1; i > 0; --i)
      std::swap(index[i], index[rng.UniformIndex(i + 1)]);

    for (std::size_t start = 0; start < index.size();
         start += static_cast<std::size_t>(hp.batch_size)) {
      const std::size_t stop =
          std::min(index.size(), start + static_cast<std::size_t>(hp.batch_size));
      grad.setZero();
      double grad_bias = 0.0;
      for (std::size_t k = start; k < stop; ++k) {
        const auto [e, row] = index[k];
        const auto x = envs[e].x.row(row);
        const double resid = x.dot(phi) + bias - envs[e].y[row];
        grad.noalias() += resid * x.transpose();
        grad_bias += resid;
      }
      const double scale = 2.0 * hp.step_size / static_cast<double>(stop - start);
      phi.noalias() -= scale * grad;
      if (with_bias) bias -= scale * grad_bias;
    }
    if (!phi.allFinite() || !std::isfinite(bias)) NonFinite("SGD iterate", epoch);
  }

  Regressor out;
  out.phi = std::move(phi);
  if (with_bias) out.bias = bias;
  return out;
}

}  // namespace invbench
