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

#include "realm/progression/progression.h"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace realm::progression {

using world::Skill;
using world::WorldState;

namespace {

double WrapAngle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

bool Holding(const WorldState& s, const std::string& id) {
  return s.attachment && s.attachment->object_id == id;
}

double HorizontalDistance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return (a - b).head<2>().norm();
}

const world::RigidObject& RequireObject(const WorldState& s, const std::string& id) {
  const world::RigidObject* o = s.scene.FindObject(id);
  if (!o) throw std::invalid_argument("object '" + id + "' not in scene");
  return *o;
}

const world::ArticulatedObject& RequireArticulated(const WorldState& s, const std::string& id) {
  const world::ArticulatedObject* a = s.scene.FindArticulated(id);
  if (!a) throw std::invalid_argument("articulated object '" + id + "' not in scene");
  return *a;
}

const world::ToggleObject& RequireToggle(const WorldState& s, const std::string& id) {
  for (const auto& t : s.scene.toggles) {
    if (t.base.id == id) return t;
  }
  throw std::invalid_argument("toggle '" + id + "' not in scene");
}

}  // namespace

Json ThresholdsToJson(const Thresholds& t) {
  return {{"reach", t.reach},
          {"lift", t.lift},
          {"move_close", t.move_close},
          {"stack_tolerance", t.stack_tolerance},
          {"touch", t.touch},
          {"touch_move", t.touch_move},
          {"rotate_degrees", t.rotate_degrees},
          {"open_fractions", t.open_fractions},
          {"close_fractions", t.close_fractions}};
}

Thresholds ThresholdsFromJson(const Json& j) {
  Thresholds t;
  t.reach = j.value("reach", t.reach);
  t.lift = j.value("lift", t.lift);
  t.move_close = j.value("move_close", t.move_close);
  t.stack_tolerance = j.value("stack_tolerance", t.stack_tolerance);
  t.touch = j.value("touch", t.touch);
  t.touch_move = j.value("touch_move", t.touch_move);
  t.rotate_degrees = j.value("rotate_degrees", t.rotate_degrees);
  t.open_fractions = j.value("open_fractions", t.open_fractions);
  t.close_fractions = j.value("close_fractions", t.close_fractions);
  if (t.open_fractions.size() != 3 || t.close_fractions.size() != 3) {
    throw std::invalid_argument("open/close fractions need exactly three entries");
  }
  return t;
}

Thresholds LoadThresholds(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return ThresholdsFromJson(Json::parse(in));
}

SkillRubric RubricFor(Skill skill) {
  switch (skill) {
    case Skill::kPut: return {skill, {"Reach", "Grasp", "Lift", "Move Close", "IsInside"}};
    case Skill::kPick: return {skill, {"Reach", "Grasp", "Lift"}};
    case Skill::kStack: return {skill, {"Reach", "Grasp", "Lift", "Move Close", "IsOnTop"}};
    case Skill::kPush: return {skill, {"Reach", "Touch", "IsToggledOn"}};
    case Skill::kRotate: return {skill, {"Reach", "Grasp", "Rotate 45"}};
    case Skill::kOpen:
      return {skill, {"Reach", "Touch & Move", "Open 50%", "Open 75%", "Open 95%"}};
    case Skill::kClose:
      return {skill, {"Reach", "Touch & Move", "Closed 50%", "Closed 75%", "Closed 95%"}};
  }
  throw std::invalid_argument("unknown skill");
}

Json ProgressionResultToJson(const ProgressionResult& r) {
  Json j = {{"stages_achieved", r.stages_achieved},
            {"stage_count", r.stage_count},
            {"score", r.score},
            {"stage_times", r.stage_times},
            {"success", r.success}};
  j["duration_to_success"] =
      r.duration_to_success ? Json(*r.duration_to_success) : Json(nullptr);
  return j;
}

ProgressionResult ProgressionResultFromJson(const Json& j) {
  ProgressionResult r;
  r.stages_achieved = j.at("stages_achieved").get<int>();
  r.stage_count = j.at("stage_count").get<int>();
  r.score = j.at("score").get<double>();
  r.stage_times = j.at("stage_times").get<std::vector<double>>();
  r.success = j.at("success").get<bool>();
  if (j.contains("duration_to_success") && !j["duration_to_success"].is_null()) {
    r.duration_to_success = j["duration_to_success"].get<double>();
  }
  return r;
}

double SurfaceDistance(const world::RigidObject& object, const Eigen::Vector3d& point) {
  const Eigen::Vector3d local =
      object.pose.orientation.conjugate() * (point - object.pose.position);
  const Eigen::Vector3d outside = (local.cwiseAbs() - 0.5 * object.size).cwiseMax(0.0);
  return outside.norm();
}

ProgressionTracker::ProgressionTracker(const world::TaskSpec& task, const WorldState& initial,
                                       const Thresholds& thresholds)
    : task_(task), thresholds_(thresholds), rubric_(RubricFor(task.skill)) {
  result_.stage_count = static_cast<int>(rubric_.stages.size());
  if (world::IsArticulatedSkill(task.skill)) {
    initial_position_ = RequireArticulated(initial, task.target).position;
  } else if (task.skill == Skill::kPush) {
    RequireToggle(initial, task.target);
  } else {
    const auto& target = RequireObject(initial, task.target);
    initial_z_ = target.pose.position.z();
    initial_yaw_ = target.pose.Yaw();
    if (task.destination) RequireObject(initial, *task.destination);
  }
}

bool ProgressionTracker::StageHolds(int stage, const WorldState& s) const {
  const Eigen::Vector3d& tool = s.tool.position;
  const Thresholds& th = thresholds_;

  if (world::IsArticulatedSkill(task_.skill)) {
    const auto& drawer = RequireArticulated(s, task_.target);
    if (stage == 0) return (tool - drawer.HandlePoint()).norm() <= th.reach;
    if (stage == 1) {
      world::RigidObject handle;
      handle.size = {0.02, 0.10, 0.02};
      handle.pose = drawer.BodyPose();
      handle.pose.position = drawer.HandlePoint();
      world::RigidObject body = drawer.base;
      body.pose = drawer.BodyPose();
      const double touch = std::min(SurfaceDistance(handle, tool), SurfaceDistance(body, tool));
      return touch <= th.touch && std::abs(drawer.position - initial_position_) >= th.touch_move;
    }
    const double f = drawer.OpenFraction();
    return task_.skill == Skill::kOpen ? f >= th.open_fractions[stage - 2]
                                       : f <= th.close_fractions[stage - 2];
  }

  if (task_.skill == Skill::kPush) {
    const auto& button = RequireToggle(s, task_.target);
    if (stage == 0) return (tool - button.base.pose.position).norm() <= th.reach;
    if (stage == 1) return SurfaceDistance(button.base, tool) <= th.touch;
    return button.toggled;
  }

  const auto& target = RequireObject(s, task_.target);
  if (stage == 0) return (tool - target.pose.position).norm() <= th.reach;
  if (stage == 1) return Holding(s, task_.target);
  if (task_.skill == Skill::kRotate) {
    const double turned = std::abs(WrapAngle(target.pose.Yaw() - initial_yaw_));
    return Holding(s, task_.target) && turned >= th.rotate_degrees * std::numbers::pi / 180.0;
  }
  if (stage == 2) {
    return Holding(s, task_.target) && target.pose.position.z() >= initial_z_ + th.lift;
  }
  const auto& dest = RequireObject(s, *task_.destination);
  if (stage == 3) {
    return Holding(s, task_.target) &&
           HorizontalDistance(target.pose.position, dest.pose.position) <= th.move_close;
  }
  if (task_.skill == Skill::kPut) {
    const Eigen::Vector3d& c = target.pose.position;
    return dest.FootprintContains(c.head<2>(), world::kReceptacleWall) &&
           c.z() >= dest.Bottom() && c.z() <= dest.Top();
  }
  // Stack.
  const double half_width = 0.5 * std::min(dest.size.x(), dest.size.y());
  return !Holding(s, task_.target) &&
         HorizontalDistance(target.pose.position, dest.pose.position) <= half_width &&
         std::abs(target.Bottom() - dest.Top()) <= th.stack_tolerance;
}

std::optional<int> ProgressionTracker::Update(const WorldState& state) {
  const int k = result_.stages_achieved;
  if (k >= result_.stage_count || !StageHolds(k, state)) return std::nullopt;
  result_.stages_achieved = k + 1;
  result_.stage_times.push_back(state.arm.time);
  result_.score = static_cast<double>(result_.stages_achieved) / result_.stage_count;
  if (result_.stages_achieved == result_.stage_count) {
    result_.success = true;
    result_.duration_to_success = state.arm.time;
  }
  return k;
}

ProgressionResult ScoreTrace(std::span<const WorldState> trace, const world::TaskSpec& task,
                             const SkillRubric& rubric, const Thresholds& thresholds) {
  if (trace.empty()) throw std::invalid_argument("ScoreTrace: empty trace");
  if (rubric.skill != task.skill) {
    throw std::invalid_argument("ScoreTrace: rubric skill " +
                                std::string(world::SkillName(rubric.skill)) +
                                " does not match task skill " +
                                std::string(world::SkillName(task.skill)));
  }
  ProgressionTracker tracker(task, trace.front(), thresholds);
  for (const WorldState& s : trace) tracker.Update(s);
  return tracker.result();
}

}  // namespace realm::progression
