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

#ifndef REALM_WORLD_WORLD_H_
#define REALM_WORLD_WORLD_H_

#include <optional>
#include <string>

#include <Eigen/Geometry>
#include "realm/arm/types.h"
#include "realm/world/scene.h"

namespace realm::world {

struct Attachment {
  std::string object_id;
  Eigen::Isometry3d grasp = Eigen::Isometry3d::Identity();  // tool -> object

  bool operator==(const Attachment& o) const {
    return object_id == o.object_id && grasp.matrix() == o.grasp.matrix();
  }
};

struct WorldConfig {
  double grasp_radius = 0.04;          // m, object center to tool point
  double close_threshold = 0.35;       // aperture below which the hand holds
  double release_threshold = 0.6;      // aperture above which it lets go
  double drawer_engage_radius = 0.03;  // m, tool point to handle
  double press_speed = 0.02;           // m/s downward to register a press
  double max_payload = 0.5;            // kg; heavier objects slip

  bool operator==(const WorldConfig&) const = default;
};

struct WorldState {
  arm::ArmState arm;
  Scene scene;
  std::optional<Attachment> attachment;
  int step_index = 0;
  Pose tool;  // forward kinematics of arm.q, cached
  // Aperture when the current closing motion began (tracks the aperture while
  // it is not decreasing).
  double closing_onset_aperture = 1.0;

  bool operator==(const WorldState&) const = default;
};

WorldState MakeWorld(const Scene& scene, const arm::ArmState& arm,
                     const arm::ArmParams& params);

// Grasp rule: aperture < close_threshold, a manipulable object's center within
// grasp_radius of the tool point, its horizontal extent below the jaw width at
// closing onset, and its mass within payload. Nearest wins; ties go to the
// lexicographically smaller id.
std::optional<Attachment> CheckAttach(const WorldState& world,
                                      const arm::ArmParams& params,
                                      const WorldConfig& config = {});

// Height of the highest surface under `xy` at or below `max_height`,
// ignoring the object `exclude_id`. The table always supports.
double SupportHeight(const Scene& scene, const Eigen::Vector2d& xy,
                     double max_height, std::string_view exclude_id);

// Vertical drop onto the highest support; yaw kept, roll and pitch zeroed.
Pose Settle(const RigidObject& object, const Scene& scene);

// One control tick: the arm is integrated for params.substeps substeps, then
// grasping, drawer coupling and button presses are resolved.
WorldState WorldStep(const WorldState& world, const arm::ArmParams& params,
                     const arm::ActionCommand& command,
                     const WorldConfig& config = {});

}  // namespace realm::world

#endif  // REALM_WORLD_WORLD_H_
