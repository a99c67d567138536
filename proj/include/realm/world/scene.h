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

#ifndef REALM_WORLD_SCENE_H_
#define REALM_WORLD_SCENE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include "realm/arm/types.h"

namespace realm::world {

using arm::Pose;

enum class Shape { kBox, kCylinder, kSphere };
enum class ObjectRole { kManipulable, kReceptacle, kDistractor, kFixture };

std::string_view ShapeName(Shape shape);
Shape ParseShape(std::string_view name);
std::string_view RoleName(ObjectRole role);
ObjectRole ParseRole(std::string_view name);

// Receptacles are open-top trays: walls and floor of this thickness.
inline constexpr double kReceptacleWall = 0.01;

struct RigidObject {
  std::string id;
  std::string noun;  // how instructions refer to it, e.g. "red cube"
  Shape shape = Shape::kBox;
  // Full extents (m). Cylinder: (diameter, diameter, height); sphere: 3x diameter.
  Eigen::Vector3d size = Eigen::Vector3d::Constant(0.05);
  double mass = 0.1;  // kg
  Pose pose;          // center of the bounding volume
  Eigen::Vector3d color = Eigen::Vector3d::Constant(0.5);
  ObjectRole role = ObjectRole::kManipulable;

  double HalfHeight() const { return 0.5 * size.z(); }
  double MaxHorizontalExtent() const { return std::max(size.x(), size.y()); }
  double Top() const { return pose.position.z() + HalfHeight(); }
  double Bottom() const { return pose.position.z() - HalfHeight(); }

  // True when the world-frame xy point lies inside the object's footprint.
  bool FootprintContains(const Eigen::Vector2d& xy, double shrink = 0.0) const;

  bool operator==(const RigidObject&) const = default;
};

// Prismatic drawer. base.pose is the body pose at position == range_min.
struct ArticulatedObject {
  RigidObject base;
  std::optional<RigidObject> housing;  // static cabinet geometry
  Eigen::Vector3d joint_axis = Eigen::Vector3d::UnitX();
  double range_min = 0.0;
  double range_max = 0.2;
  double position = 0.0;
  Eigen::Vector3d handle_offset = Eigen::Vector3d::Zero();  // body frame

  double OpenFraction() const {
    return (position - range_min) / (range_max - range_min);
  }
  Pose BodyPose() const;
  Eigen::Vector3d HandlePoint() const;
  void SetPosition(double p);  // clamps to range

  bool operator==(const ArticulatedObject&) const = default;
};

struct ToggleObject {
  RigidObject base;
  bool toggled = false;
  bool pressed = false;  // tool point currently inside press_region
  Eigen::Vector3d region_min = Eigen::Vector3d::Constant(-0.02);  // object frame
  Eigen::Vector3d region_max = Eigen::Vector3d::Constant(0.02);

  bool RegionContains(const Eigen::Vector3d& world_point) const;

  bool operator==(const ToggleObject&) const = default;
};

struct Light {
  Eigen::Vector3d direction = -Eigen::Vector3d::UnitZ();  // direction of travel
  Eigen::Vector3d color = Eigen::Vector3d::Ones();
  double intensity = 1.0;

  bool operator==(const Light&) const = default;
};

struct CameraIntrinsics {
  int width = 224;
  int height = 224;
  double fx = 200.0, fy = 200.0, cx = 112.0, cy = 112.0;

  bool operator==(const CameraIntrinsics&) const = default;
};

// Optical frame: +z forward, +x right, +y down. A wrist camera's pose is
// relative to the tool frame; any other camera's pose is in the world frame.
struct Camera {
  std::string name;
  Pose pose;
  CameraIntrinsics intrinsics;
  bool on_wrist = false;

  bool operator==(const Camera&) const = default;
};

inline constexpr std::string_view kExternalCamera = "external";
inline constexpr std::string_view kWristCamera = "wrist";

struct Scene {
  std::vector<RigidObject> objects;
  std::vector<ArticulatedObject> articulated;
  std::vector<ToggleObject> toggles;
  double table_height = 0.0;
  std::vector<Light> lights;
  std::vector<Camera> cameras;

  const RigidObject* FindObject(std::string_view id) const;
  RigidObject* FindObject(std::string_view id);
  const ArticulatedObject* FindArticulated(std::string_view id) const;
  ArticulatedObject* FindArticulated(std::string_view id);
  const ToggleObject* FindToggle(std::string_view id) const;
  ToggleObject* FindToggle(std::string_view id);
  const Camera* FindCamera(std::string_view name) const;
  Camera* FindCamera(std::string_view name);

  // Body of any kind by id (rigid, drawer body, or toggle base).
  const RigidObject* FindBody(std::string_view id) const;
  bool HasId(std::string_view id) const { return FindBody(id) != nullptr; }

  // Throws std::invalid_argument on duplicate ids, bad sizes, missing
  // cameras, or out-of-range drawer positions.
  void Validate() const;

  bool operator==(const Scene&) const = default;
};

}  // namespace realm::world

#endif  // REALM_WORLD_SCENE_H_
