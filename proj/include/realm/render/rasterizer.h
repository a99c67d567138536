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

#ifndef REALM_RENDER_RASTERIZER_H_
#define REALM_RENDER_RASTERIZER_H_

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include "realm/arm/types.h"
#include "realm/render/image.h"
#include "realm/world/scene.h"

namespace realm::render {

inline constexpr double kAmbient = 0.15;
inline constexpr double kNearPlane = 0.01;  // m

struct Triangle {
  std::array<Eigen::Vector3d, 3> vertices;  // world frame
  Eigen::Vector3d normal;                   // outward, unit
  Eigen::Vector3d albedo;
};

struct ArmView {
  const arm::ArmParams* params = nullptr;
  arm::JointVector q = arm::JointVector::Zero();
  double aperture = 1.0;
};

// Boxes for the link chain, hand and fingers, in world frame.
std::vector<world::RigidObject> ArmGeometry(const ArmView& arm);

void AppendPrimitive(const world::RigidObject& body, std::vector<Triangle>& out);

// Every visible body of the scene (receptacles as floor plus four walls),
// plus the arm when given.
std::vector<Triangle> Tessellate(const world::Scene& scene,
                                 const std::optional<ArmView>& arm);

// World pose of the optical frame. Wrist cameras need the arm.
arm::Pose CameraWorldPose(const world::Camera& camera,
                          const std::optional<ArmView>& arm);

// Flat-shaded z-buffered pinhole rasterization. Each triangle's radiance is
// albedo * (ambient + sum_i intensity_i * color_i * max(0, n . -d_i)); empty
// pixels hold the ambient level.
RadianceImage Rasterize(const std::vector<Triangle>& triangles,
                        const std::vector<world::Light>& lights, double ambient,
                        const arm::Pose& camera_pose,
                        const world::CameraIntrinsics& intrinsics);

// Throws std::invalid_argument for an unknown camera name.
RadianceImage RenderRadiance(const world::Scene& scene, std::string_view camera,
                             const std::optional<ArmView>& arm = std::nullopt);

Image Render(const world::Scene& scene, std::string_view camera,
             const std::optional<ArmView>& arm = std::nullopt);

}  // namespace realm::render

#endif  // REALM_RENDER_RASTERIZER_H_
