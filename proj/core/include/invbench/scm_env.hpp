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

#ifndef INVBENCH_SCM_ENV_HPP_
#define INVBENCH_SCM_ENV_HPP_

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "invbench/random.hpp"

namespace invbench {

enum class NoiseModel {
  // Environment scale on the target noise: (sigma_y, sigma_2) = (e, 1).
  kHomoskedastic,
  // Environment scale on the spurious-feature noise: (sigma_y, sigma_2) = (1, e).
  kHeteroskedastic,
};

std::string_view NoiseModelName(NoiseModel model);

// The four unit-test settings: {no confounder, confounder} x {noise model}.
enum class SettingId {
  kHom,
  kHet,
  kHomConf,
  kHetConf,
};

inline constexpr std::array<SettingId, 4> kAllSettings = {
    SettingId::kHom, SettingId::kHet, SettingId::kHomConf, SettingId::kHetConf};

std::string_view SettingName(SettingId id);
// Throws Error(kInvalidConfig) for unknown names.
SettingId ParseSetting(std::string_view name);
bool SettingHasConfounder(SettingId id);
NoiseModel SettingNoiseModel(SettingId id);

// Full description of one linear SEM unit-test setting.
struct ScmConfig {
  int d1 = 5;
  int d2 = 5;
  // Confounder width; must be 0 unless `confounder` is set.
  int dh = 0;
  bool confounder = false;
  NoiseModel noise_model = NoiseModel::kHomoskedastic;
  std::vector<double> env_scales = {0.2, 2.0, 5.0};
  double weight_std = 0.35;
  int n_per_env = 1000;
  std::uint64_t master_seed = 0;

  // Multipliers on the structural target / spurious noise standard
  // deviations. 1 is the nominal model; 0 switches the term off.
  double sigma_y_scale = 1.0;
  double sigma_2_scale = 1.0;

  int dim() const { return d1 + d2; }

  // Throws Error(kInvalidConfig) naming the first violated invariant.
  void Validate() const;
};

// Builds the config for `id` from a template. The template's `dh` is the
// confounder width used when the setting has one (5 if the template says 0).
ScmConfig MakeSettingConfig(const ScmConfig& base, SettingId id);

struct NoiseLevels {
  double target;     // sigma_y
  double spurious;   // sigma_2
};

// Structural noise standard deviations of an environment with scale `scale`.
NoiseLevels EnvironmentNoise(const ScmConfig& config, double scale);

struct GroundTruth {
  Eigen::VectorXd w_1y;   // d1
  Eigen::VectorXd w_y2;   // d2
  Eigen::MatrixXd w_h1;   // d1 x dh
  Eigen::VectorXd w_hy;   // dh
  Eigen::MatrixXd w_h2;   // d2 x dh
  // (w_1y || 0): the invariant predictor over (Z1 || Z2).
  Eigen::VectorXd optimal_regressor;

  int d1() const { return static_cast<int>(w_1y.size()); }
  int d2() const { return static_cast<int>(w_y2.size()); }
  int dh() const { return static_cast<int>(w_hy.size()); }
};

struct EnvDataset {
  double scale = 1.0;
  Eigen::MatrixXd x;  // n x (d1 + d2), rows are (Z1 || Z2)
  Eigen::VectorXd y;  // n

  Eigen::Index size() const { return y.size(); }
  Eigen::Index dim() const { return x.cols(); }
};

// Every weight entry i.i.d. N(0, weight_std^2). Draw order: w_1y, w_y2,
// then (if confounder) w_h1, w_hy, w_h2, each column-major.
GroundTruth SampleGroundTruth(const ScmConfig& config, RandomStream& rng);

// Draws config.n_per_env rows from the environment with parameter `scale`:
//   H  ~ N(0, scale^2 I)                       (confounder only)
//   Z1 = w_h1 H + N(0, scale^2 I)
//   Y  = w_1y' Z1 + w_hy' H + N(0, sigma_y^2)
//   Z2 = w_y2 Y + w_h2 H + N(0, sigma_2^2 I)
EnvDataset SampleEnvironment(const GroundTruth& gt, const ScmConfig& config,
                             double scale, RandomStream& rng);

// Stacks several environments into one design matrix and target vector.
EnvDataset Concatenate(const std::vector<EnvDataset>& envs);

}  // namespace invbench

#endif  // INVBENCH_SCM_ENV_HPP_
