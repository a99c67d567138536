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

#ifndef REALM_HARNESS_EPISODE_H_
#define REALM_HARNESS_EPISODE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "realm/arm/types.h"
#include "realm/common/json_eigen.h"
#include "realm/harness/policy.h"
#include "realm/perturb/perturb.h"
#include "realm/progression/progression.h"
#include "realm/world/world.h"

namespace realm::harness {

// Everything an episode needs besides the task, perturbation and policy.
struct EpisodeConfig {
  arm::ArmParams params;
  world::WorldConfig world;
  progression::Thresholds thresholds;
  perturb::PerturbConfig perturb;
  perturb::InstructionVariantTable variants;
  arm::ArmState home;
};

// Loads arm/droid_panda.json and config/*.json under a data directory.
EpisodeConfig LoadEpisodeConfig(const std::filesystem::path& data_dir);

enum class EpisodeStatus {
  kSuccess,
  kMaxSteps,
  kPolicyTimeout,
  kProtocolError,
  kPolicyError,
  kConnectionLost,
  kNotApplicable,
  kSetupError,
};

std::string_view StatusName(EpisodeStatus status);
EpisodeStatus ParseStatus(std::string_view name);

// State after one executed action.
struct StepRecord {
  arm::ActionCommand action;
  arm::JointVector q = arm::JointVector::Zero();
  arm::JointVector qdot = arm::JointVector::Zero();
  double gripper = 1.0;
  double time = 0.0;
  std::map<std::string, arm::Pose> objects;  // non-fixture rigid bodies
  std::map<std::string, double> drawers;     // joint positions
  std::map<std::string, bool> toggles;
  std::string held;  // empty when nothing is attached
  std::optional<int> stage;  // stage credited on this state

  bool operator==(const StepRecord&) const = default;
};

// True for statuses whose rollouts count toward a cell's mean.
bool IsScored(EpisodeStatus status);

// Captures the recorded fields of a world state.
StepRecord CaptureStep(const world::WorldState& state, const arm::ActionCommand& action,
                       std::optional<int> stage);

struct RolloutRecord {
  std::string task_id;
  std::string policy_id;
  perturb::PerturbationSpec spec;
  uint64_t seed = 0;
  EpisodeStatus status = EpisodeStatus::kMaxSteps;
  std::string message;  // diagnostic for failed episodes
  std::string instruction;
  // Initial conditions, sufficient to re-simulate the stored actions.
  world::TaskSpec task;  // after the perturbation
  world::Scene scene;    // after the perturbation
  arm::ArmState initial_arm;
  arm::ArmParams params;
  world::WorldConfig world_config;
  progression::Thresholds thresholds;
  std::optional<int> initial_stage;
  std::vector<StepRecord> steps;
  progression::ProgressionResult progression;
  double wall_sim_time = 0.0;  // s of simulated time

  bool operator==(const RolloutRecord&) const = default;
};

Json StepRecordToJson(const StepRecord& s);
StepRecord StepRecordFromJson(const Json& j);
Json RolloutRecordToJson(const RolloutRecord& r);
RolloutRecord RolloutRecordFromJson(const Json& j);
void SaveRolloutRecord(const RolloutRecord& r, const std::filesystem::path& path);
RolloutRecord LoadRolloutRecord(const std::filesystem::path& path);

// Applies the perturbation to (task, base_scene), resets the world and the
// policy, then alternates observation and action chunks until success or
// max_steps. Policy failures end the episode with a status instead of
// throwing; the progression is scored on the partial trace.
RolloutRecord RunEpisode(const world::TaskSpec& task, const world::Scene& base_scene,
                         const perturb::PerturbationSpec& spec, Policy& policy, uint64_t seed,
                         const EpisodeConfig& config);

// Observation for the current world state. Images are rendered for every
// scene camera and passed through the perturbation's observation transform.
Observation MakeObservation(const world::WorldState& state, const arm::ArmParams& params,
                            const perturb::PerturbationSpec& spec, bool with_images);

struct ReplayReport {
  bool ok = true;
  int steps_checked = 0;
  std::optional<int> first_mismatch;  // step index
  std::string detail;
};

// Re-simulates the stored actions from the stored initial conditions and
// compares every recorded field and the progression bit for bit.
ReplayReport ReplayRecord(const RolloutRecord& record);

}  // namespace realm::harness

#endif  // REALM_HARNESS_EPISODE_H_
