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

#include "realm/sysid/sysid.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "realm/arm/dynamics.h"
#include "realm/arm/params_io.h"
#include "realm/common/rng.h"

namespace realm::sysid {

using arm::ActionCommand;
using arm::ArmParams;
using arm::JointVector;
using arm::kNumJoints;

ParamVector EncodeParams(const ArmParams& params) {
  ParamVector x;
  x << params.friction.array().log().matrix(), params.armature.array().log().matrix();
  return x;
}

ArmParams DecodeParams(const ParamVector& x, const ArmParams& base) {
  ArmParams p = base;
  p.friction = x.head<kNumJoints>().array().exp().matrix();
  p.armature = x.tail<kNumJoints>().array().exp().matrix();
  return p;
}

void TrajectoryPair::Validate() const {
  if (commands.empty()) throw std::invalid_argument("trajectory pair has no ticks");
  if (commands.size() != q_real.size()) {
    throw std::invalid_argument("trajectory pair: commands and q_real differ in length");
  }
}

double AlignmentLoss(const ParamVector& x, const SysIdDataset& dataset, const ArmParams& base) {
  if (dataset.pairs.empty()) throw std::invalid_argument("empty sysid dataset");
  if (!x.allFinite()) return kInstabilityPenalty;
  const ArmParams params = DecodeParams(x, base);
  double loss = 0.0;
  for (const TrajectoryPair& pair : dataset.pairs) {
    std::vector<JointVector> q_sim;
    try {
      q_sim = arm::ReplayTrajectory(pair.initial_state, params, pair.commands,
                                    params.control_hz, params.substeps);
    } catch (const std::invalid_argument&) {
      return kInstabilityPenalty;
    }
    for (size_t t = 0; t < q_sim.size(); ++t) loss += (pair.q_real[t] - q_sim[t]).squaredNorm();
  }
  if (!std::isfinite(loss)) return kInstabilityPenalty;
  return std::min(loss, kInstabilityPenalty);
}

IdentifyResult Identify(const SysIdDataset& dataset, const ArmParams& base,
                        const IdentifyOptions& options) {
  if (dataset.pairs.empty()) throw std::invalid_argument("empty sysid dataset");
  for (const auto& pair : dataset.pairs) pair.Validate();
  const Objective objective = [&](const Eigen::VectorXd& v) {
    return AlignmentLoss(ParamVector(v), dataset, base);
  };
  const ParamVector init = EncodeParams(base);

  CmaEsOptions cma;
  cma.init_sigma = options.init_sigma;
  cma.budget = options.cma_budget;
  cma.seed = options.seed;
  cma.workers = options.workers;
  const OptimizeResult coarse = CmaEsMinimize(objective, init, cma);

  AnnealOptions anneal = options.anneal;
  anneal.seed = HashCombine(options.seed, anneal.seed);
  const OptimizeResult fine = AnnealRefine(objective, coarse.x, anneal);

  IdentifyResult result;
  result.params = DecodeParams(ParamVector(fine.x), base);
  result.init_loss = objective(init);
  result.cma_loss = coarse.value;
  result.final_loss = fine.value;
  result.evaluations = coarse.evaluations + fine.evaluations;
  return result;
}

SysIdDataset SyntheticDataset(const ArmParams& truth, const JointVector& home, int num_pairs,
                              int ticks, uint64_t seed) {
  if (num_pairs < 1 || ticks < 1) throw std::invalid_argument("synthetic dataset size");
  SysIdDataset data;
  for (int p = 0; p < num_pairs; ++p) {
    CounterRng rng(HashCombine(seed, static_cast<uint64_t>(p)));
    TrajectoryPair pair;
    pair.initial_state.q = home;
    pair.initial_state.qdot.setZero();
    JointVector target = home;
    std::array<int, kNumJoints> hold{};
    for (int t = 0; t < ticks; ++t) {
      for (int j = 0; j < kNumJoints; ++j) {
        if (hold[j]-- > 0) continue;
        hold[j] = 4 + static_cast<int>(rng.UniformInt(12));
        target(j) = home(j) + rng.Uniform(-0.5, 0.5);
      }
      ActionCommand cmd;
      cmd.joint_targets = truth.limits.Clamp(target);
      pair.commands.push_back(cmd);
    }
    pair.q_real = arm::ReplayTrajectory(pair.initial_state, truth, pair.commands,
                                        truth.control_hz, truth.substeps);
    data.pairs.push_back(std::move(pair));
  }
  return data;
}

Json TrajectoryPairToJson(const TrajectoryPair& pair) {
  Json commands = Json::array();
  for (const auto& c : pair.commands) commands.push_back(VectorToJson(c.ToVector()));
  Json q_real = Json::array();
  for (const auto& q : pair.q_real) q_real.push_back(VectorToJson(q));
  return {{"initial_state", arm::ArmStateToJson(pair.initial_state)},
          {"commands", commands},
          {"q_real", q_real}};
}

TrajectoryPair TrajectoryPairFromJson(const Json& j) {
  TrajectoryPair pair;
  pair.initial_state = arm::ArmStateFromJson(j.at("initial_state"));
  for (const auto& c : j.at("commands")) {
    pair.commands.push_back(
        ActionCommand::FromVector(VectorFromJson<arm::kActionSize>(c, "command")));
  }
  for (const auto& q : j.at("q_real")) {
    pair.q_real.push_back(VectorFromJson<kNumJoints>(q, "q_real"));
  }
  pair.Validate();
  return pair;
}

SysIdDataset LoadDataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("sysid data directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  SysIdDataset data;
  for (const auto& f : files) {
    std::ifstream in(f);
    try {
      data.pairs.push_back(TrajectoryPairFromJson(Json::parse(in)));
    } catch (const std::exception& e) {
      throw std::runtime_error(f.string() + ": " + e.what());
    }
  }
  if (data.pairs.empty()) throw std::runtime_error("no trajectory pairs in " + dir.string());
  return data;
}

void SaveDataset(const SysIdDataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (size_t i = 0; i < dataset.pairs.size(); ++i) {
    std::ostringstream name;
    name << "pair_" << std::setw(3) << std::setfill('0') << i << ".json";
    std::ofstream out(dir / name.str());
    out << TrajectoryPairToJson(dataset.pairs[i]).dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write " + (dir / name.str()).string());
  }
}

}  // namespace realm::sysid
