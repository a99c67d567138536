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

#ifndef REALM_SYSID_SYSID_H_
#define REALM_SYSID_SYSID_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>
#include "realm/arm/types.h"
#include "realm/common/json_eigen.h"
#include "realm/sysid/cma_es.h"

namespace realm::sysid {

inline constexpr int kNumParams = 2 * arm::kNumJoints;
inline constexpr double kInstabilityPenalty = 1e9;

// Log-space parameters: entries 0-6 are log friction, 7-13 log armature.
using ParamVector = Eigen::Matrix<double, kNumParams, 1>;

ParamVector EncodeParams(const arm::ArmParams& params);
arm::ArmParams DecodeParams(const ParamVector& x, const arm::ArmParams& base);

struct TrajectoryPair {
  std::vector<arm::ActionCommand> commands;
  std::vector<arm::JointVector> q_real;
  arm::ArmState initial_state;

  void Validate() const;
};

struct SysIdDataset {
  std::vector<TrajectoryPair> pairs;
};

// Sum over pairs and ticks of the squared joint-space distance between the
// recorded positions and an open-loop replay under `base` with friction and
// armature taken from x. Unstable candidates score kInstabilityPenalty.
double AlignmentLoss(const ParamVector& x, const SysIdDataset& dataset,
                     const arm::ArmParams& base);

struct IdentifyOptions {
  uint64_t seed = 0;
  double init_sigma = 0.5;
  int cma_budget = 8000;
  AnnealOptions anneal;
  int workers = 1;
};

struct IdentifyResult {
  arm::ArmParams params;
  double init_loss = 0.0;
  double cma_loss = 0.0;
  double final_loss = 0.0;
  int evaluations = 0;
};

// CMA-ES from the parameters of `base`, then annealing refinement.
IdentifyResult Identify(const SysIdDataset& dataset, const arm::ArmParams& base,
                        const IdentifyOptions& options);

// Piecewise-constant random joint targets around `home`, replayed under
// `truth` to produce q_real.
SysIdDataset SyntheticDataset(const arm::ArmParams& truth, const arm::JointVector& home,
                              int num_pairs, int ticks, uint64_t seed);

Json TrajectoryPairToJson(const TrajectoryPair& pair);
TrajectoryPair TrajectoryPairFromJson(const Json& j);

// One JSON file per pair, read in lexicographic filename order.
SysIdDataset LoadDataset(const std::filesystem::path& dir);
void SaveDataset(const SysIdDataset& dataset, const std::filesystem::path& dir);

}  // namespace realm::sysid

#endif  // REALM_SYSID_SYSID_H_
