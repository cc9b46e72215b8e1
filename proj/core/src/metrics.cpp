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

#include "invbench/metrics.hpp"

#include <string>

#include "invbench/errors.hpp"

namespace invbench {

std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kIrmV1:
      return "IrmV1";
    case Method::kErmAnalytic:
      return "ErmAnalytic";
    case Method::kErmSgd:
      return "ErmSgd";
  }
  return "Unknown";
}

Method ParseMethod(std::string_view name) {
  for (Method m : {Method::kIrmV1, Method::kErmAnalytic, Method::kErmSgd})
    if (MethodName(m) == name) return m;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown method '" + std::string(name) +
                  "' (expected IrmV1, ErmAnalytic or ErmSgd)");
}

Evaluation Evaluate(const Regressor& r, const GroundTruth& gt,
                    const EnvDataset& test_env) {
  const int d1 = gt.d1();
  const int d2 = gt.d2();
  if (r.phi.size() != d1 + d2)
    throw Error(ErrorCode::kDimensionMismatch,
                "regressor length does not match ground truth");
  Evaluation ev;
  ev.causal_err = (r.phi.head(d1) - gt.w_1y).norm();
  ev.noncausal_err = r.phi.tail(d2).norm();
  ev.test_mse = EmpiricalRisk(r, test_env);
  return ev;
}

}  // namespace invbench
