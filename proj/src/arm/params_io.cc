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

#include "realm/arm/params_io.h"

#include <fstream>
#include <stdexcept>

namespace realm::arm {
namespace {

Json IsometryToJson(const Eigen::Isometry3d& t) {
  Json rot = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(t.linear()(r, c));
  return {{"translation", VectorToJson(Eigen::Vector3d(t.translation()))},
          {"rotation", rot}};
}

// Accepts either a row-major "rotation" matrix or "rpy" (fixed-axis X-Y-Z).
Eigen::Isometry3d IsometryFromJson(const Json& j) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translation() = VectorFromJson<3>(j.at("translation"), "translation");
  if (j.contains("rotation")) {
    const auto m = VectorFromJson<9>(j.at("rotation"), "rotation");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) t.linear()(r, c) = m(3 * r + c);
  } else if (j.contains("rpy")) {
    const Eigen::Vector3d rpy = VectorFromJson<3>(j.at("rpy"), "rpy");
    t.linear() = (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
                  Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
                  Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
                     .toRotationMatrix();
  }
  return t;
}

JointVector Joints(const Json& j, const char* key) {
  return VectorFromJson<kNumJoints>(j.at(key), key);
}

}  // namespace

Json PoseToJson(const Pose& pose) {
  return {{"position", VectorToJson(pose.position)},
          {"orientation", QuaternionToJson(pose.orientation)}};
}

Pose PoseFromJson(const Json& j) {
  Pose p;
  p.position = VectorFromJson<3>(j.at("position"), "position");
  if (j.contains("orientation")) {
    p.orientation = QuaternionFromJson(j.at("orientation"));
    if (std::abs(p.orientation.norm() - 1.0) > 1e-9) p.orientation.normalize();
  } else if (j.contains("yaw")) {
    p.orientation = Eigen::AngleAxisd(j.at("yaw").get<double>(),
                                      Eigen::Vector3d::UnitZ());
  }
  return p;
}

Json ArmStateToJson(const ArmState& state) {
  return {{"q", VectorToJson(state.q)},
          {"qdot", VectorToJson(state.qdot)},
          {"gripper", state.gripper_aperture},
          {"time", state.time}};
}

ArmState ArmStateFromJson(const Json& j) {
  ArmState s;
  s.q = Joints(j, "q");
  s.qdot = j.contains("qdot") ? Joints(j, "qdot") : JointVector::Zero();
  s.gripper_aperture = j.value("gripper", 1.0);
  s.time = j.value("time", 0.0);
  return s;
}

Json ArmParamsToJson(const ArmParams& p) {
  Json limits = Json::array();
  for (int i = 0; i < kNumJoints; ++i)
    limits.push_back({p.limits.lower(i), p.limits.upper(i)});
  Json links = Json::array();
  for (const auto& t : p.link_transforms) links.push_back(IsometryToJson(t));
  return {{"friction", VectorToJson(p.friction)},
          {"armature", VectorToJson(p.armature)},
          {"kp", VectorToJson(p.kp)},
          {"kd", VectorToJson(p.kd)},
          {"link_inertia", VectorToJson(p.link_inertia)},
          {"joint_limits", limits},
          {"link_transforms", links},
          {"coulomb_ratio", p.coulomb_ratio},
          {"control_hz", p.control_hz},
          {"substeps", p.substeps},
          {"gripper_slew", p.gripper_slew},
          {"gripper_max_width", p.gripper_max_width}};
}

ArmParams ArmParamsFromJson(const Json& j) {
  ArmParams p;
  p.friction = Joints(j, "friction");
  p.armature = Joints(j, "armature");
  p.kp = Joints(j, "kp");
  p.kd = Joints(j, "kd");
  p.link_inertia = Joints(j, "link_inertia");
  const Json& limits = j.at("joint_limits");
  if (!limits.is_array() || limits.size() != kNumJoints)
    throw std::invalid_argument("joint_limits: expected 7 [lower, upper] pairs");
  for (int i = 0; i < kNumJoints; ++i) {
    p.limits.lower(i) = limits.at(i).at(0).get<double>();
    p.limits.upper(i) = limits.at(i).at(1).get<double>();
  }
  const Json& links = j.at("link_transforms");
  if (!links.is_array() || links.size() != kNumLinkTransforms)
    throw std::invalid_argument("link_transforms: expected 8 transforms");
  for (int i = 0; i < kNumLinkTransforms; ++i)
    p.link_transforms[i] = IsometryFromJson(links.at(i));
  p.coulomb_ratio = j.value("coulomb_ratio", 0.1);
  p.control_hz = j.value("control_hz", 15.0);
  p.substeps = j.value("substeps", 8);
  p.gripper_slew = j.value("gripper_slew", 4.0);
  p.gripper_max_width = j.value("gripper_max_width", 0.08);
  p.Validate();
  return p;
}

ArmParams LoadArmParams(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open arm params: " + path.string());
  return ArmParamsFromJson(Json::parse(in));
}

void SaveArmParams(const ArmParams& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write arm params: " + path.string());
  out << ArmParamsToJson(params).dump(2) << "\n";
}

}  // namespace realm::arm
