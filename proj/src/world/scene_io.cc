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

#include "realm/world/scene_io.h"

#include <fstream>
#include <stdexcept>

#include "realm/arm/params_io.h"

namespace realm::world {

using arm::PoseFromJson;
using arm::PoseToJson;

Json RigidObjectToJson(const RigidObject& o) {
  return {{"id", o.id},
          {"noun", o.noun},
          {"shape", ShapeName(o.shape)},
          {"size", VectorToJson(o.size)},
          {"mass", o.mass},
          {"pose", PoseToJson(o.pose)},
          {"color", VectorToJson(o.color)},
          {"role", RoleName(o.role)}};
}

RigidObject RigidObjectFromJson(const Json& j) {
  RigidObject o;
  o.id = j.at("id").get<std::string>();
  o.noun = j.value("noun", o.id);
  o.shape = ParseShape(j.value("shape", "box"));
  o.size = VectorFromJson<3>(j.at("size"), "size");
  o.mass = j.value("mass", 0.1);
  o.pose = PoseFromJson(j.at("pose"));
  if (j.contains("color")) o.color = VectorFromJson<3>(j.at("color"), "color");
  o.role = ParseRole(j.value("role", "manipulable"));
  return o;
}

namespace {

Json ArticulatedToJson(const ArticulatedObject& a) {
  Json j = {{"body", RigidObjectToJson(a.base)},
            {"joint_axis", VectorToJson(a.joint_axis)},
            {"range", {a.range_min, a.range_max}},
            {"position", a.position},
            {"handle_offset", VectorToJson(a.handle_offset)}};
  if (a.housing) j["housing"] = RigidObjectToJson(*a.housing);
  return j;
}

ArticulatedObject ArticulatedFromJson(const Json& j) {
  ArticulatedObject a;
  a.base = RigidObjectFromJson(j.at("body"));
  if (j.contains("housing")) a.housing = RigidObjectFromJson(j.at("housing"));
  a.joint_axis = VectorFromJson<3>(j.at("joint_axis"), "joint_axis");
  if (std::abs(a.joint_axis.norm() - 1.0) > 1e-12) a.joint_axis.normalize();
  a.range_min = j.at("range").at(0).get<double>();
  a.range_max = j.at("range").at(1).get<double>();
  a.position = j.value("position", a.range_min);
  a.handle_offset = VectorFromJson<3>(j.at("handle_offset"), "handle_offset");
  return a;
}

Json ToggleToJson(const ToggleObject& t) {
  return {{"body", RigidObjectToJson(t.base)},
          {"toggled", t.toggled},
          {"pressed", t.pressed},
          {"press_region",
           {{"min", VectorToJson(t.region_min)}, {"max", VectorToJson(t.region_max)}}}};
}

ToggleObject ToggleFromJson(const Json& j) {
  ToggleObject t;
  t.base = RigidObjectFromJson(j.at("body"));
  t.toggled = j.value("toggled", false);
  t.pressed = j.value("pressed", false);
  t.region_min = VectorFromJson<3>(j.at("press_region").at("min"), "press_region.min");
  t.region_max = VectorFromJson<3>(j.at("press_region").at("max"), "press_region.max");
  return t;
}

Json CameraToJson(const Camera& c) {
  const CameraIntrinsics& k = c.intrinsics;
  return {{"name", c.name},
          {"pose", PoseToJson(c.pose)},
          {"on_wrist", c.on_wrist},
          {"intrinsics",
           {{"width", k.width}, {"height", k.height}, {"fx", k.fx},
            {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}}}};
}

// Cameras may be given by look-at ("eye", "target") instead of a pose.
Camera CameraFromJson(const Json& j) {
  Camera c;
  c.name = j.at("name").get<std::string>();
  c.on_wrist = j.value("on_wrist", false);
  if (j.contains("pose")) {
    c.pose = PoseFromJson(j.at("pose"));
  } else {
    const Eigen::Vector3d eye = VectorFromJson<3>(j.at("eye"), "eye");
    const Eigen::Vector3d target = VectorFromJson<3>(j.at("target"), "target");
    const Eigen::Vector3d z = (target - eye).normalized();
    Eigen::Vector3d x = z.cross(Eigen::Vector3d::UnitZ());
    if (x.norm() < 1e-9) x = Eigen::Vector3d::UnitX();
    x.normalize();
    const Eigen::Vector3d y = z.cross(x);
    Eigen::Matrix3d r;
    r << x, y, z;
    c.pose.position = eye;
    c.pose.orientation = Eigen::Quaterniond(r).normalized();
  }
  const Json& k = j.at("intrinsics");
  c.intrinsics.width = k.value("width", 224);
  c.intrinsics.height = k.value("height", 224);
  c.intrinsics.fx = k.at("fx").get<double>();
  c.intrinsics.fy = k.value("fy", c.intrinsics.fx);
  c.intrinsics.cx = k.value("cx", 0.5 * c.intrinsics.width);
  c.intrinsics.cy = k.value("cy", 0.5 * c.intrinsics.height);
  return c;
}

}  // namespace

Json SceneToJson(const Scene& scene) {
  Json objects = Json::array(), articulated = Json::array(), toggles = Json::array();
  Json lights = Json::array(), cameras = Json::array();
  for (const auto& o : scene.objects) objects.push_back(RigidObjectToJson(o));
  for (const auto& a : scene.articulated) articulated.push_back(ArticulatedToJson(a));
  for (const auto& t : scene.toggles) toggles.push_back(ToggleToJson(t));
  for (const auto& l : scene.lights) {
    lights.push_back({{"direction", VectorToJson(l.direction)},
                      {"color", VectorToJson(l.color)},
                      {"intensity", l.intensity}});
  }
  for (const auto& c : scene.cameras) cameras.push_back(CameraToJson(c));
  return {{"table_height", scene.table_height},
          {"objects", objects},
          {"articulated", articulated},
          {"toggles", toggles},
          {"lights", lights},
          {"cameras", cameras}};
}

Scene SceneFromJson(const Json& j) {
  Scene s;
  s.table_height = j.value("table_height", 0.0);
  for (const auto& o : j.value("objects", Json::array()))
    s.objects.push_back(RigidObjectFromJson(o));
  for (const auto& a : j.value("articulated", Json::array()))
    s.articulated.push_back(ArticulatedFromJson(a));
  for (const auto& t : j.value("toggles", Json::array()))
    s.toggles.push_back(ToggleFromJson(t));
  for (const auto& l : j.value("lights", Json::array())) {
    Light light;
    light.direction = VectorFromJson<3>(l.at("direction"), "light.direction");
    if (std::abs(light.direction.norm() - 1.0) > 1e-12) light.direction.normalize();
    light.color = VectorFromJson<3>(l.at("color"), "light.color");
    light.intensity = l.at("intensity").get<double>();
    s.lights.push_back(light);
  }
  for (const auto& c : j.value("cameras", Json::array()))
    s.cameras.push_back(CameraFromJson(c));
  s.Validate();
  return s;
}

Scene LoadScene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene: " + path.string());
  try {
    return SceneFromJson(Json::parse(in));
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

Json WorldConfigToJson(const WorldConfig& c) {
  return {{"grasp_radius", c.grasp_radius},
          {"close_threshold", c.close_threshold},
          {"release_threshold", c.release_threshold},
          {"drawer_engage_radius", c.drawer_engage_radius},
          {"press_speed", c.press_speed},
          {"max_payload", c.max_payload}};
}

WorldConfig WorldConfigFromJson(const Json& j) {
  WorldConfig c;
  c.grasp_radius = j.value("grasp_radius", c.grasp_radius);
  c.close_threshold = j.value("close_threshold", c.close_threshold);
  c.release_threshold = j.value("release_threshold", c.release_threshold);
  c.drawer_engage_radius = j.value("drawer_engage_radius", c.drawer_engage_radius);
  c.press_speed = j.value("press_speed", c.press_speed);
  c.max_payload = j.value("max_payload", c.max_payload);
  return c;
}

}  // namespace realm::world
