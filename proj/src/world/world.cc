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

#include "realm/world/world.h"

#include <limits>

#include "realm/arm/dynamics.h"
#include "realm/arm/kinematics.h"

namespace realm::world {

WorldState MakeWorld(const Scene& scene, const arm::ArmState& arm,
                     const arm::ArmParams& params) {
  WorldState w;
  w.arm = arm;
  w.scene = scene;
  w.tool = arm::ForwardKinematics(arm.q, params);
  w.closing_onset_aperture = arm.gripper_aperture;
  return w;
}

std::optional<Attachment> CheckAttach(const WorldState& world,
                                      const arm::ArmParams& params,
                                      const WorldConfig& config) {
  if (!(world.arm.gripper_aperture < config.close_threshold)) return std::nullopt;
  const double jaw_width = world.closing_onset_aperture * params.gripper_max_width;
  const RigidObject* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const RigidObject& o : world.scene.objects) {
    if (o.role != ObjectRole::kManipulable) continue;
    const double dist = (o.pose.position - world.tool.position).norm();
    if (dist > config.grasp_radius) continue;
    if (!(o.MaxHorizontalExtent() < jaw_width)) continue;
    if (o.mass > config.max_payload) continue;
    if (dist < best_dist || (dist == best_dist && best && o.id < best->id)) {
      best = &o;
      best_dist = dist;
    }
  }
  if (!best) return std::nullopt;
  return Attachment{best->id,
                    world.tool.ToIsometry().inverse() * best->pose.ToIsometry()};
}

double SupportHeight(const Scene& scene, const Eigen::Vector2d& xy,
                     double max_height, std::string_view exclude_id) {
  double best = scene.table_height;
  auto consider = [&](double h) {
    if (h <= max_height + 1e-9 && h > best) best = h;
  };
  auto consider_body = [&](const RigidObject& o) {
    if (o.id == exclude_id) return;
    if (o.role == ObjectRole::kReceptacle) {
      if (o.FootprintContains(xy, kReceptacleWall)) {
        consider(o.Bottom() + kReceptacleWall);
      } else if (o.FootprintContains(xy)) {
        consider(o.Top());
      }
      return;
    }
    if (o.shape == Shape::kSphere) return;
    if (o.FootprintContains(xy)) consider(o.Top());
  };
  for (const auto& o : scene.objects) consider_body(o);
  for (const auto& a : scene.articulated) {
    RigidObject body = a.base;
    body.pose = a.BodyPose();
    consider_body(body);
    if (a.housing) consider_body(*a.housing);
  }
  for (const auto& t : scene.toggles) consider_body(t.base);
  return best;
}

Pose Settle(const RigidObject& object, const Scene& scene) {
  const double support = SupportHeight(scene, object.pose.position.head<2>(),
                                       object.Bottom(), object.id);
  Pose p;
  p.position = object.pose.position;
  p.position.z() = support + object.HalfHeight();
  p.orientation = Eigen::AngleAxisd(object.pose.Yaw(), Eigen::Vector3d::UnitZ());
  return p;
}

WorldState WorldStep(const WorldState& world, const arm::ArmParams& params,
                     const arm::ActionCommand& command,
                     const WorldConfig& config) {
  WorldState next = world;
  const double dt = params.SubstepDt();
  for (int s = 0; s < params.substeps; ++s) {
    next.arm = arm::Step(next.arm, params, command, dt);
  }
  next.tool = arm::ForwardKinematics(next.arm.q, params);
  ++next.step_index;

  const double before = world.arm.gripper_aperture;
  const double after = next.arm.gripper_aperture;
  if (after >= before) next.closing_onset_aperture = after;

  if (next.attachment) {
    RigidObject* held = next.scene.FindObject(next.attachment->object_id);
    if (held && after > config.release_threshold) {
      next.attachment.reset();
      held->pose = Settle(*held, next.scene);
    } else if (held) {
      held->pose = Pose::FromIsometry(next.tool.ToIsometry() * next.attachment->grasp);
    }
  } else {
    next.attachment = CheckAttach(next, params, config);
  }

  const Eigen::Vector3d tool_motion = next.tool.position - world.tool.position;
  for (ArticulatedObject& drawer : next.scene.articulated) {
    const bool engaged =
        (world.tool.position - drawer.HandlePoint()).norm() <= config.drawer_engage_radius &&
        after < config.close_threshold;
    if (engaged) drawer.SetPosition(drawer.position + tool_motion.dot(drawer.joint_axis));
  }

  const double down_speed =
      (world.tool.position.z() - next.tool.position.z()) / params.ControlDt();
  for (ToggleObject& button : next.scene.toggles) {
    const bool inside = button.RegionContains(next.tool.position);
    if (inside && !button.pressed && down_speed > config.press_speed) {
      button.toggled = !button.toggled;
    }
    button.pressed = inside;
  }
  return next;
}

}  // namespace realm::world
