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

#ifndef REALM_HARNESS_SCRIPTED_H_
#define REALM_HARNESS_SCRIPTED_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "realm/arm/kinematics.h"
#include "realm/common/rng.h"
#include "realm/harness/policy.h"

namespace realm::harness {

// Standard ready pose: tool about 0.3 m in front of the base, pointing down.
arm::JointVector HomeJoints();
arm::ArmState HomeState();

struct Waypoint {
  arm::Pose pose;
  double gripper = 1.0;
  double speed = 0.18;  // m/s of the Cartesian setpoint on the way here
  int dwell = 0;        // ticks to hold once reached
};

// Cartesian plan for the task's skill on the given scene, starting from the
// tool pose `start`. Throws std::invalid_argument when the task's objects are
// missing from the scene.
std::vector<Waypoint> PlanWaypoints(const world::TaskSpec& task, const world::Scene& scene,
                                    const arm::Pose& start);

struct ExpertOptions {
  double position_tolerance = 0.004;   // m, tool to waypoint before advancing
  double gripper_tolerance = 0.05;
  double angular_speed = 1.2;          // rad/s of the orientation setpoint
  int max_ticks_per_waypoint = 60;     // advance anyway after this many ticks
};

// Waypoint follower driven by privileged task and scene state. Each call
// moves the Cartesian setpoint toward the current waypoint, solves IK seeded
// from the previous target and returns one joint-space action. When IK fails
// it holds the last target and reports failed().
class ExpertPolicy : public Policy {
 public:
  explicit ExpertPolicy(ExpertOptions options = {}) : options_(options) {}

  std::string Id() const override { return "scripted:expert"; }
  Capabilities capabilities() const override { return {false, true}; }
  void Reset(const EpisodeStart& start) override;
  std::vector<arm::ActionCommand> Act(const Observation& obs) override;

  bool failed() const { return failed_; }
  size_t waypoint_index() const { return index_; }

 private:
  ExpertOptions options_;
  arm::ArmParams params_;
  world::TaskSpec task_;
  world::Scene scene_;
  std::vector<Waypoint> plan_;
  size_t index_ = 0;
  int ticks_at_waypoint_ = 0;
  int dwell_left_ = -1;
  std::optional<arm::Pose> setpoint_;
  arm::JointVector last_target_ = arm::JointVector::Zero();
  bool failed_ = false;
};

// Expert whose joint targets carry zero-mean noise of scale sigma (rad): a
// per-episode offset (0.8 sigma) plus independent per-step jitter
// (0.6 sigma), both Gaussian, so the total per-step deviation has standard
// deviation sigma. sigma = 0 reproduces the expert exactly.
class NoisyExpertPolicy : public Policy {
 public:
  explicit NoisyExpertPolicy(double sigma, ExpertOptions options = {});

  std::string Id() const override;
  Capabilities capabilities() const override { return {false, true}; }
  void Reset(const EpisodeStart& start) override;
  std::vector<arm::ActionCommand> Act(const Observation& obs) override;

 private:
  double sigma_;
  ExpertPolicy expert_;
  CounterRng rng_{0};
  arm::JointVector bias_ = arm::JointVector::Zero();
};

// Uniform joint targets within the limits and uniform gripper targets, each
// held for `hold` ticks.
class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(arm::ArmParams params, int hold = 5);

  std::string Id() const override { return "scripted:random"; }
  Capabilities capabilities() const override { return {false, false}; }
  void Reset(const EpisodeStart& start) override;
  std::vector<arm::ActionCommand> Act(const Observation& obs) override;

 private:
  arm::ArmParams params_;
  int hold_;
  CounterRng rng_{0};
};

// Commands the observed joint positions and gripper: the PD fixed point.
class HoldPolicy : public Policy {
 public:
  std::string Id() const override { return "scripted:hold"; }
  Capabilities capabilities() const override { return {false, false}; }
  void Reset(const EpisodeStart&) override {}
  std::vector<arm::ActionCommand> Act(const Observation& obs) override;
};

// Always returns one all-zero action.
class ZeroPolicy : public Policy {
 public:
  std::string Id() const override { return "scripted:zero"; }
  Capabilities capabilities() const override { return {false, false}; }
  void Reset(const EpisodeStart&) override {}
  std::vector<arm::ActionCommand> Act(const Observation& obs) override;
};

// Parses "expert", "noisy:<sigma>", "random", "hold" or "zero" (the part
// after "scripted:"). Throws std::invalid_argument otherwise.
std::unique_ptr<Policy> MakeScriptedPolicy(const std::string& name,
                                           const arm::ArmParams& params);

}  // namespace realm::harness

#endif  // REALM_HARNESS_SCRIPTED_H_
