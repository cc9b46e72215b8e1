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

#ifndef INVBENCH_METRICS_HPP_
#define INVBENCH_METRICS_HPP_

#include <cstdint>
#include <string>
#include <string_view>

#include "invbench/scm_env.hpp"
#include "invbench/solvers.hpp"

namespace invbench {

enum class Method { kIrmV1, kErmAnalytic, kErmSgd };

std::string_view MethodName(Method m);
// Throws Error(kInvalidConfig) for unknown names.
Method ParseMethod(std::string_view name);

struct Evaluation {
  double causal_err = 0.0;     // ||phi[0..d1) - w_1y||
  double noncausal_err = 0.0;  // ||phi[d1..d1+d2)||
  double test_mse = 0.0;       // empirical risk on the held-out environment
};

Evaluation Evaluate(const Regressor& r, const GroundTruth& gt,
                    const EnvDataset& test_env);

inline constexpr std::string_view kStatusOk = "ok";

// One (setting, arm, trial, method) row of results.csv. Rows with a status
// other than "ok" carry no metrics.
struct TrialResult {
  SettingId setting = SettingId::kHom;
  double weight_std = 0.0;
  int trial = 0;
  Method method = Method::kIrmV1;
  double causal_err = 0.0;
  double noncausal_err = 0.0;
  double test_mse = 0.0;
  std::uint64_t seed = 0;
  std::string status{kStatusOk};

  bool ok() const { return status == kStatusOk; }
};

}  // namespace invbench

#endif  // INVBENCH_METRICS_HPP_
