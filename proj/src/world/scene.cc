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

#include "realm/world/scene.h"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace realm::world {
namespace {

template <typename T, typename Pred>
auto FindIn(T& items, Pred pred) -> decltype(&items.front()) {
  auto it = std::find_if(items.begin(), items.end(), pred);
  return it == items.end() ? nullptr : &*it;
}

void ValidateBody(const RigidObject& o) {
  if (o.id.empty()) throw std::invalid_argument("object with empty id");
  if ((o.size.array() <= 0.0).any())
    throw std::invalid_argument("object '" + o.id + "': size must be positive");
  if (!(o.mass > 0.0))
    throw std::invalid_argument("object '" + o.id + "': mass must be positive");
}

}  // namespace

std::string_view ShapeName(Shape shape) {
  switch (shape) {
    case Shape::kBox: return "box";
    case Shape::kCylinder: return "cylinder";
    case Shape::kSphere: return "sphere";
  }
  return "box";
}

Shape ParseShape(std::string_view name) {
  if (name == "box") return Shape::kBox;
  if (name == "cylinder") return Shape::kCylinder;
  if (name == "sphere") return Shape::kSphere;
  throw std::invalid_argument("unknown shape '" + std::string(name) + "'");
}

std::string_view RoleName(ObjectRole role) {
  switch (role) {
    case ObjectRole::kManipulable: return "manipulable";
    case ObjectRole::kReceptacle: return "receptacle";
    case ObjectRole::kDistractor: return "distractor";
    case ObjectRole::kFixture: return "fixture";
  }
  return "fixture";
}

ObjectRole ParseRole(std::string_view name) {
  if (name == "manipulable") return ObjectRole::kManipulable;
  if (name == "receptacle") return ObjectRole::kReceptacle;
  if (name == "distractor") return ObjectRole::kDistractor;
  if (name == "fixture") return ObjectRole::kFixture;
  throw std::invalid_argument("unknown object role '" + std::string(name) + "'");
}

bool RigidObject::FootprintContains(const Eigen::Vector2d& xy, double shrink) const {
  const double yaw = pose.Yaw();
  const Eigen::Vector2d d = xy - pose.position.head<2>();
  const double c = std::cos(yaw), s = std::sin(yaw);
  const Eigen::Vector2d local(c * d.x() + s * d.y(), -s * d.x() + c * d.y());
  if (shape == Shape::kBox) {
    return std::abs(local.x()) <= 0.5 * size.x() - shrink &&
           std::abs(local.y()) <= 0.5 * size.y() - shrink;
  }
  return local.norm() <= 0.5 * size.x() - shrink;
}

Pose ArticulatedObject::BodyPose() const {
  Pose p = base.pose;
  p.position += joint_axis * (position - range_min);
  return p;
}

Eigen::Vector3d ArticulatedObject::HandlePoint() const {
  return BodyPose().ToIsometry() * handle_offset;
}

void ArticulatedObject::SetPosition(double p) {
  position = std::clamp(p, range_min, range_max);
}

bool ToggleObject::RegionContains(const Eigen::Vector3d& world_point) const {
  const Eigen::Vector3d local = base.pose.ToIsometry().inverse() * world_point;
  return (local.array() >= region_min.array()).all() &&
         (local.array() <= region_max.array()).all();
}

const RigidObject* Scene::FindObject(std::string_view id) const {
  return FindIn(objects, [&](const RigidObject& o) { return o.id == id; });
}
RigidObject* Scene::FindObject(std::string_view id) {
  return FindIn(objects, [&](const RigidObject& o) { return o.id == id; });
}
const ArticulatedObject* Scene::FindArticulated(std::string_view id) const {
  return FindIn(articulated, [&](const ArticulatedObject& o) { return o.base.id == id; });
}
ArticulatedObject* Scene::FindArticulated(std::string_view id) {
  return FindIn(articulated, [&](const ArticulatedObject& o) { return o.base.id == id; });
}
const ToggleObject* Scene::FindToggle(std::string_view id) const {
  return FindIn(toggles, [&](const ToggleObject& o) { return o.base.id == id; });
}
ToggleObject* Scene::FindToggle(std::string_view id) {
  return FindIn(toggles, [&](const ToggleObject& o) { return o.base.id == id; });
}
const Camera* Scene::FindCamera(std::string_view name) const {
  return FindIn(cameras, [&](const Camera& c) { return c.name == name; });
}
Camera* Scene::FindCamera(std::string_view name) {
  return FindIn(cameras, [&](const Camera& c) { return c.name == name; });
}

const RigidObject* Scene::FindBody(std::string_view id) const {
  if (const RigidObject* o = FindObject(id)) return o;
  if (const ArticulatedObject* a = FindArticulated(id)) return &a->base;
  if (const ToggleObject* t = FindToggle(id)) return &t->base;
  return nullptr;
}

void Scene::Validate() const {
  std::set<std::string> ids;
  auto add = [&](const RigidObject& o) {
    ValidateBody(o);
    if (!ids.insert(o.id).second)
      throw std::invalid_argument("duplicate object id '" + o.id + "'");
  };
  for (const auto& o : objects) add(o);
  for (const auto& a : articulated) {
    add(a.base);
    if (a.housing) add(*a.housing);
    if (!(a.range_max > a.range_min))
      throw std::invalid_argument("drawer '" + a.base.id + "': empty range");
    if (a.position < a.range_min || a.position > a.range_max)
      throw std::invalid_argument("drawer '" + a.base.id + "': position out of range");
  }
  for (const auto& t : toggles) add(t.base);
  int external = 0, wrist = 0;
  for (const auto& c : cameras) {
    if (c.intrinsics.width <= 0 || c.intrinsics.height <= 0 ||
        !(c.intrinsics.fx > 0.0) || !(c.intrinsics.fy > 0.0))
      throw std::invalid_argument("camera '" + c.name + "': bad intrinsics");
    external += c.name == kExternalCamera;
    wrist += c.name == kWristCamera;
  }
  if (external != 1 || wrist != 1)
    throw std::invalid_argument("scene needs exactly one 'external' and one 'wrist' camera");
  for (const auto& l : lights) {
    if (l.intensity < 0.0) throw std::invalid_argument("negative light intensity");
  }
}

}  // namespace realm::world
