// Copyright 2026 The realm-desk Authors
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

#ifndef REALM_SYSID_CMA_ES_H_
#define REALM_SYSID_CMA_ES_H_

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace realm::sysid {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  // Best objective after each CMA-ES generation or annealing round.
  std::vector<double> trace;
};

struct CmaEsOptions {
  double init_sigma = 0.5;
  int budget = 6000;
  uint64_t seed = 0;
  // Population size; 0 selects 4 + floor(3 ln n).
  int lambda = 0;
  // Concurrent objective evaluations per generation. The objective must be
  // safe to call from several threads when workers > 1.
  int workers = 1;
};

int DefaultPopulationSize(int dimension);

// (mu/mu_w, lambda) CMA-ES with rank-one and rank-mu covariance updates and
// cumulative step-size adaptation. The initial mean is evaluated first, then
// candidates in generation order; selection is rank based. Returns the best
// point ever evaluated. Stops when the budget is exhausted or the search
// distribution collapses.
OptimizeResult CmaEsMinimize(const Objective& objective, const Eigen::VectorXd& init_mean,
                             const CmaEsOptions& options);

struct AnnealOptions {
  int rounds = 6;
  int proposals_per_round = 200;
  double initial_scale = 0.2;
  double decay = 0.5;
  uint64_t seed = 0;
};

// Coordinate-cyclic random search on log-space parameters. Proposal k of
// round r perturbs coordinate k mod n by log(1 + u * scale_r) with u uniform
// in [-1, 1) and scale_r = initial_scale * decay^r, i.e. a multiplicative
// step on the physical value. Only strict improvements are accepted.
OptimizeResult AnnealRefine(const Objective& objective, const Eigen::VectorXd& start,
                            const AnnealOptions& options);

}  // namespace realm::sysid

#endif  // REALM_SYSID_CMA_ES_H_
