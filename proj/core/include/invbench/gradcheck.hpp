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

#ifndef INVBENCH_GRADCHECK_HPP_
#define INVBENCH_GRADCHECK_HPP_

#include <cstdint>
#include <vector>

namespace invbench {

struct GradientCheckCase {
  int num_envs = 0;
  int samples_per_env = 0;
  int dim = 0;
  bool with_bias = false;
  double lambda = 0.0;
  double max_rel_error = 0.0;
};

struct GradientCheckReport {
  double tolerance = 0.0;
  std::vector<GradientCheckCase> cases;

  double worst() const;
  bool passed() const { return worst() <= tolerance; }
};

// |a - b| / max(|a|, |b|, 1): relative error, absolute below unit scale.
double GradientRelativeError(double analytic, double numeric);

// Compares IrmObjectiveGrad against central differences of IrmObjective on
// `num_cases` random (phi, data, lambda) triples drawn from `seed`.
GradientCheckReport RunGradientChecks(std::uint64_t seed, int num_cases = 100,
                                      double step = 1e-6,
                                      double tolerance = 1e-5);

}  // namespace invbench

#endif  // INVBENCH_GRADCHECK_HPP_
