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

#include "realm/harness/scripted.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "realm/arm/kinematics.h"

namespace realm::harness {

using arm::ActionCommand;
using arm::JointVector;
using arm::Pose;
using world::Skill;

namespace {

constexpr double kApproachHeight = 0.12;  // m above a grasp or press point
constexpr double kSlowSpeed = 0.10;       // m/s for contact moves
constexpr double kPlaceClearance = 0.005; // m above the resting height
constexpr double kRotateAngle = 1.1;      // rad, comfortably past 45 degrees
constexpr int kGripDwell = 3;

Eigen::Vector3d Above(const Eigen::Vector3d& p, double dz) { return p + Eigen::Vector3d(0, 0, dz); }

Pose At(const Eigen::Vector3d& position, const Eigen::Quaterniond& orientation) {
  Pose p;
  p.position = position;
  p.orientation = orientation;
  return p;
}

const world::RigidObject& RequireRigid(const world::Scene& scene, const std::string& id) {
  const world::RigidObject* o = scene.FindObject(id);
  if (!o) throw std::invalid_argument("PlanWaypoints: no object '" + id + "' in scene");
  return *o;
}

void AppendPick(const world::RigidObject& target, const Eigen::Quaterniond& down,
                double carry_z, std::vector<Waypoint>& plan) {
  const Eigen::Vector3d c = target.pose.position;
  plan.push_back({At(Above(c, kApproachHeight), down), 1.0});
  plan.push_back({At(c, down), 1.0, kSlowSpeed});
  plan.push_back({At(c, down), 0.0, kSlowSpeed, kGripDwell});
  Eigen::Vector3d up = c;
  up.z() = carry_z;
  plan.push_back({At(up, down), 0.0, kSlowSpeed});
}

}  // namespace

JointVector HomeJoints() {
  JointVector q;
  q << 0.0, -std::numbers::pi / 4, 0.0, -3 * std::numbers::pi / 4, 0.0, std::numbers::pi / 2,
      std::numbers::pi / 4;
  return q;
}

arm::ArmState HomeState() {
  arm::ArmState s;
  s.q = HomeJoints();
  s.gripper_aperture = 1.0;
  return s;
}

std::vector<Waypoint> PlanWaypoints(const world::TaskSpec& task, const world::Scene& scene,
                                    const Pose& start) {
  const Eigen::Quaterniond down = start.orientation;
  std::vector<Waypoint> plan;

  if (world::IsArticulatedSkill(task.skill)) {
    const world::ArticulatedObject* drawer = scene.FindArticulated(task.target);
    if (!drawer) throw std::invalid_argument("PlanWaypoints: no drawer '" + task.target + "'");
    const Eigen::Vector3d h = drawer->HandlePoint();
    // Overshoot the travel limit slightly; the joint clamps.
    const double travel = task.skill == Skill::kOpen
                              ? drawer->range_max - drawer->position + 0.01
                              : -(drawer->position - drawer->range_min + 0.01);
    const Eigen::Vector3d end = h + drawer->joint_axis * travel;
    plan.push_back({At(Above(h, kApproachHeight), down), 1.0});
    plan.push_back({At(h, down), 1.0, kSlowSpeed});
    plan.push_back({At(h, down), 0.0, kSlowSpeed, kGripDwell});
    plan.push_back({At(end, down), 0.0, kSlowSpeed});
    plan.push_back({At(end, down), 1.0, kSlowSpeed, kGripDwell});
    plan.push_back({At(Above(end, 0.08), down), 1.0});
    return plan;
  }

  if (task.skill == Skill::kPush) {
    const world::ToggleObject* button = scene.FindToggle(task.target);
    if (!button) throw std::invalid_argument("PlanWaypoints: no button '" + task.target + "'");
    const Eigen::Vector3d c = button->base.pose.position;
    plan.push_back({At(Above(c, kApproachHeight), down), 0.0});
    plan.push_back({At(c, down), 0.0, kSlowSpeed, kGripDwell});
    plan.push_back({At(Above(c, kApproachHeight), down), 0.0});
    return plan;
  }

  const world::RigidObject& target = RequireRigid(scene, task.target);
  const double lift_z = target.pose.position.z() + kApproachHeight;

  if (task.skill == Skill::kPick) {
    AppendPick(target, down, lift_z, plan);
    return plan;
  }
  if (task.skill == Skill::kRotate) {
    AppendPick(target, down, target.pose.position.z() + 0.03, plan);
    const Eigen::Quaterniond turned =
        Eigen::AngleAxisd(kRotateAngle, Eigen::Vector3d::UnitZ()) * down;
    plan.push_back({At(plan.back().pose.position, turned), 0.0, kSlowSpeed, kGripDwell});
    return plan;
  }

  // Put and stack.
  const world::RigidObject& dest = RequireRigid(scene, *task.destination);
  const double rest_z = task.skill == Skill::kPut
                            ? dest.Bottom() + world::kReceptacleWall + target.HalfHeight()
                            : dest.Top() + target.HalfHeight();
  const Eigen::Vector3d place(dest.pose.position.x(), dest.pose.position.y(),
                              rest_z + kPlaceClearance);
  const double carry_z = std::max(lift_z, place.z() + 0.10);
  AppendPick(target, down, carry_z, plan);
  plan.push_back({At(Above(place, carry_z - place.z()), down), 0.0});
  plan.push_back({At(place, down), 0.0, kSlowSpeed});
  plan.push_back({At(place, down), 1.0, kSlowSpeed, kGripDwell});
  plan.push_back({At(Above(place, 0.10), down), 1.0});
  return plan;
}

void ExpertPolicy::Reset(const EpisodeStart& start) {
  if (!start.privileged) throw std::invalid_argument("expert policy needs privileged state");
  params_ = start.privileged->params;
  plan_.clear();
  index_ = 0;
  ticks_at_waypoint_ = 0;
  dwell_left_ = -1;
  setpoint_.reset();
  failed_ = false;
  task_ = start.privileged->task;
  scene_ = start.privileged->scene;
}

std::vector<ActionCommand> ExpertPolicy::Act(const Observation& obs) {
  const Pose tool = arm::ForwardKinematics(obs.joint_pos, params_);
  if (!setpoint_) {
    setpoint_ = tool;
    last_target_ = obs.joint_pos;
    plan_ = PlanWaypoints(task_, scene_, tool);
  }
  if (failed_ || index_ >= plan_.size()) {
    const double g = plan_.empty() ? obs.gripper : plan_.back().gripper;
    return {ActionCommand{last_target_, failed_ ? obs.gripper : g}};
  }

  const Waypoint& wp = plan_[index_];
  const double dt = params_.ControlDt();
  Pose& sp = *setpoint_;
  const Eigen::Vector3d delta = wp.pose.position - sp.position;
  const double step = wp.speed * dt;
  if (delta.norm() <= step) {
    sp.position = wp.pose.position;
  } else {
    sp.position += delta * (step / delta.norm());
  }
  const double angle = sp.orientation.angularDistance(wp.pose.orientation);
  const double max_turn = options_.angular_speed * dt;
  if (angle <= max_turn) {
    sp.orientation = wp.pose.orientation;
  } else {
    sp.orientation = sp.orientation.slerp(max_turn / angle, wp.pose.orientation);
  }

  const arm::IkResult ik = arm::InverseKinematics(sp, last_target_, params_);
  if (!ik.reachable) {
    failed_ = true;
    return {ActionCommand{last_target_, obs.gripper}};
  }
  last_target_ = ik.q;
  const ActionCommand action{ik.q, wp.gripper};

  ++ticks_at_waypoint_;
  const bool setpoint_done =
      sp.position == wp.pose.position && sp.orientation.coeffs() == wp.pose.orientation.coeffs();
  const bool arrived =
      setpoint_done && (tool.position - wp.pose.position).norm() < options_.position_tolerance &&
      std::abs(obs.gripper - wp.gripper) < options_.gripper_tolerance;
  if (dwell_left_ < 0 && (arrived || ticks_at_waypoint_ >= options_.max_ticks_per_waypoint)) {
    dwell_left_ = wp.dwell;
  }
  if (dwell_left_ == 0) {
    ++index_;
    ticks_at_waypoint_ = 0;
    dwell_left_ = -1;
  } else if (dwell_left_ > 0) {
    --dwell_left_;
  }
  return {action};
}

NoisyExpertPolicy::NoisyExpertPolicy(double sigma, ExpertOptions options)
    : sigma_(sigma), expert_(options) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("noisy expert sigma must be finite and >= 0");
  }
}

std::string NoisyExpertPolicy::Id() const {
  std::string s = std::to_string(sigma_);
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  return "scripted:noisy:" + s;
}

void NoisyExpertPolicy::Reset(const EpisodeStart& start) {
  expert_.Reset(start);
  rng_ = CounterRng(HashCombine(start.episode_seed, HashString("noisy_expert")));
  for (int j = 0; j < arm::kNumJoints; ++j) bias_(j) = 0.8 * sigma_ * rng_.Normal();
}

std::vector<ActionCommand> NoisyExpertPolicy::Act(const Observation& obs) {
  std::vector<ActionCommand> chunk = expert_.Act(obs);
  for (ActionCommand& a : chunk) {
    for (int j = 0; j < arm::kNumJoints; ++j) {
      a.joint_targets(j) += bias_(j) + 0.6 * sigma_ * rng_.Normal();
    }
  }
  return chunk;
}

RandomPolicy::RandomPolicy(arm::ArmParams params, int hold)
    : params_(std::move(params)), hold_(hold) {
  if (hold < 1 || hold > kMaxChunk) throw std::invalid_argument("random policy hold out of range");
}

void RandomPolicy::Reset(const EpisodeStart& start) {
  rng_ = CounterRng(HashCombine(start.episode_seed, HashString("random_policy")));
}

std::vector<ActionCommand> RandomPolicy::Act(const Observation&) {
  ActionCommand a;
  for (int j = 0; j < arm::kNumJoints; ++j) {
    a.joint_targets(j) = rng_.Uniform(params_.limits.lower(j), params_.limits.upper(j));
  }
  a.gripper_target = rng_.Uniform();
  return std::vector<ActionCommand>(static_cast<size_t>(hold_), a);
}

std::vector<ActionCommand> HoldPolicy::Act(const Observation& obs) {
  return {ActionCommand{obs.joint_pos, obs.gripper}};
}

std::vector<ActionCommand> ZeroPolicy::Act(const Observation&) {
  return {ActionCommand{JointVector::Zero(), 0.0}};
}

std::unique_ptr<Policy> MakeScriptedPolicy(const std::string& name, const arm::ArmParams& params) {
  if (name == "expert") return std::make_unique<ExpertPolicy>();
  if (name == "random") return std::make_unique<RandomPolicy>(params);
  if (name == "hold") return std::make_unique<HoldPolicy>();
  if (name == "zero") return std::make_unique<ZeroPolicy>();
  if (name.rfind("noisy:", 0) == 0) {
    const std::string value = name.substr(6);
    size_t used = 0;
    double sigma = 0.0;
    try {
      sigma = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw std::invalid_argument("bad noise level in scripted policy '" + name + "'");
    }
    return std::make_unique<NoisyExpertPolicy>(sigma);
  }
  throw std::invalid_argument("unknown scripted policy '" + name + "'");
}

}  // namespace realm::harness
