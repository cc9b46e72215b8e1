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

#include "invbench/scm_env.hpp"

#include <cmath>
#include <string>

#include "invbench/errors.hpp"

namespace invbench {
namespace {

constexpr int kDefaultConfounderDim = 5;

[[noreturn]] void Invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

void FillGaussian(Eigen::Ref<Eigen::MatrixXd> m, double stddev,
                  RandomStream& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = stddev * rng.Normal();
}

}  // namespace

std::string_view NoiseModelName(NoiseModel model) {
  return model == NoiseModel::kHomoskedastic ? "homoskedastic"
                                             : "heteroskedastic";
}

std::string_view SettingName(SettingId id) {
  switch (id) {
    case SettingId::kHom:
      return "hom";
    case SettingId::kHet:
      return "het";
    case SettingId::kHomConf:
      return "hom_conf";
    case SettingId::kHetConf:
      return "het_conf";
  }
  return "unknown";
}

SettingId ParseSetting(std::string_view name) {
  for (SettingId id : kAllSettings)
    if (SettingName(id) == name) return id;
  Invalid("unknown setting '" + std::string(name) +
          "' (expected hom, het, hom_conf or het_conf)");
}

bool SettingHasConfounder(SettingId id) {
  return id == SettingId::kHomConf || id == SettingId::kHetConf;
}

NoiseModel SettingNoiseModel(SettingId id) {
  return (id == SettingId::kHom || id == SettingId::kHomConf)
             ? NoiseModel::kHomoskedastic
             : NoiseModel::kHeteroskedastic;
}

void ScmConfig::Validate() const {
  if (d1 < 1) Invalid("d1 must be >= 1");
  if (d2 < 1) Invalid("d2 must be >= 1");
  if (confounder && dh < 1) Invalid("dh must be >= 1 when confounder is set");
  if (!confounder && dh != 0) Invalid("dh must be 0 when confounder is unset");
  if (env_scales.empty()) Invalid("env_scales must be non-empty");
  for (double e : env_scales)
    if (!(e > 0.0) || !std::isfinite(e))
      Invalid("env_scales entries must be finite and > 0");
  if (!(weight_std > 0.0) || !std::isfinite(weight_std))
    Invalid("weight_std must be finite and > 0");
  if (n_per_env < 1) Invalid("n_per_env must be >= 1");
  if (!(sigma_y_scale >= 0.0) || !std::isfinite(sigma_y_scale))
    Invalid("sigma_y_scale must be finite and >= 0");
  if (!(sigma_2_scale >= 0.0) || !std::isfinite(sigma_2_scale))
    Invalid("sigma_2_scale must be finite and >= 0");
}

ScmConfig MakeSettingConfig(const ScmConfig& base, SettingId id) {
  ScmConfig config = base;
  config.confounder = SettingHasConfounder(id);
  config.noise_model = SettingNoiseModel(id);
  config.dh = config.confounder ? (base.dh > 0 ? base.dh : kDefaultConfounderDim)
                                : 0;
  return config;
}

NoiseLevels EnvironmentNoise(const ScmConfig& config, double scale) {
  const bool homo = config.noise_model == NoiseModel::kHomoskedastic;
  return {(homo ? scale : 1.0) * config.sigma_y_scale,
          (homo ? 1.0 : scale) * config.sigma_2_scale};
}

GroundTruth SampleGroundTruth(const ScmConfig& config, RandomStream& rng) {
  config.Validate();
  const int dh = config.confounder ? config.dh : 0;
  const double s = config.weight_std;

  GroundTruth gt;
  gt.w_1y.resize(config.d1);
  gt.w_y2.resize(config.d2);
  gt.w_h1 = Eigen::MatrixXd::Zero(config.d1, dh);
  gt.w_hy = Eigen::VectorXd::Zero(dh);
  gt.w_h2 = Eigen::MatrixXd::Zero(config.d2, dh);

  FillGaussian(gt.w_1y, s, rng);
  FillGaussian(gt.w_y2, s, rng);
  if (config.confounder) {
    FillGaussian(gt.w_h1, s, rng);
    FillGaussian(gt.w_hy, s, rng);
    FillGaussian(gt.w_h2, s, rng);
  }

  gt.optimal_regressor = Eigen::VectorXd::Zero(config.dim());
  gt.optimal_regressor.head(config.d1) = gt.w_1y;
  return gt;
}

EnvDataset SampleEnvironment(const GroundTruth& gt, const ScmConfig& config,
                             double scale, RandomStream& rng) {
  config.Validate();
  if (!(scale > 0.0)) Invalid("environment scale must be > 0");
  if (gt.d1() != config.d1 || gt.d2() != config.d2 ||
      gt.dh() != (config.confounder ? config.dh : 0))
    throw Error(ErrorCode::kDimensionMismatch,
                "ground truth does not match config dimensions");

  const int d1 = config.d1;
  const int d2 = config.d2;
  const int dh = gt.dh();
  const NoiseLevels noise = EnvironmentNoise(config, scale);

  EnvDataset ds;
  ds.scale = scale;
  ds.x.resize(config.n_per_env, d1 + d2);
  ds.y.resize(config.n_per_env);

  Eigen::VectorXd h(dh);
  Eigen::VectorXd z1(d1);
  Eigen::VectorXd z2(d2);
  for (int i = 0; i < config.n_per_env; ++i) {
    for (int k = 0; k < dh; ++k) h[k] = scale * rng.Normal();
    for (int k = 0; k < d1; ++k) z1[k] = scale * rng.Normal();
    if (dh > 0) z1.noalias() += gt.w_h1 * h;

    double y = gt.w_1y.dot(z1) + noise.target * rng.Normal();
    if (dh > 0) y += gt.w_hy.dot(h);

    for (int k = 0; k < d2; ++k) z2[k] = noise.spurious * rng.Normal();
    z2.noalias() += gt.w_y2 * y;
    if (dh > 0) z2.noalias() += gt.w_h2 * h;

    ds.x.row(i).head(d1) = z1.transpose();
    ds.x.row(i).tail(d2) = z2.transpose();
    ds.y[i] = y;
  }
  return ds;
}

EnvDataset Concatenate(const std::vector<EnvDataset>& envs) {
  EnvDataset pooled;
  if (envs.empty()) return pooled;
  Eigen::Index rows = 0;
  const Eigen::Index cols = envs.front().dim();
  for (const auto& e : envs) {
    if (e.dim() != cols)
      throw Error(ErrorCode::kDimensionMismatch,
                  "environments have different feature counts");
    rows += e.size();
  }
  pooled.scale = envs.front().scale;
  pooled.x.resize(rows, cols);
  pooled.y.resize(rows);
  Eigen::Index offset = 0;
  for (const auto& e : envs) {
    pooled.x.middleRows(offset, e.size()) = e.x;
    pooled.y.segment(offset, e.size()) = e.y;
    offset += e.size();
  }
  return pooled;
}

}  // namespace invbench
