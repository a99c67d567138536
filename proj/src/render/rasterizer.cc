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

#include "realm/render/rasterizer.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "realm/arm/kinematics.h"

namespace realm::render {
namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;
using world::RigidObject;
using world::Shape;

constexpr int kCylinderSegments = 16;
constexpr int kSphereRings = 8;
constexpr int kSphereSegments = 16;

void AppendConvex(const Vector3d& a, const Vector3d& b, const Vector3d& c,
                  const Vector3d& center, const Vector3d& albedo,
                  std::vector<Triangle>& out) {
  Vector3d n = (b - a).cross(c - a);
  const double len = n.norm();
  if (len < 1e-14) return;
  n /= len;
  if (n.dot((a + b + c) / 3.0 - center) < 0.0) n = -n;
  out.push_back({{a, b, c}, n, albedo});
}

void AppendBox(const Eigen::Isometry3d& pose, const Vector3d& size,
               const Vector3d& albedo, std::vector<Triangle>& out) {
  const Vector3d h = 0.5 * size;
  auto corner = [&](int i) {
    return Vector3d(pose * Vector3d((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                                    (i & 4) ? h.z() : -h.z()));
  };
  const Vector3d center = pose.translation();
  static constexpr int kFaces[6][4] = {{0, 2, 6, 4}, {1, 3, 7, 5}, {0, 1, 5, 4},
                                       {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 5, 7, 6}};
  for (const auto& f : kFaces) {
    AppendConvex(corner(f[0]), corner(f[1]), corner(f[2]), center, albedo, out);
    AppendConvex(corner(f[0]), corner(f[2]), corner(f[3]), center, albedo, out);
  }
}

void AppendCylinder(const Eigen::Isometry3d& pose, const Vector3d& size,
                    const Vector3d& albedo, std::vector<Triangle>& out) {
  const double rx = 0.5 * size.x(), ry = 0.5 * size.y(), hz = 0.5 * size.z();
  const Vector3d center = pose.translation();
  auto rim = [&](int i, double z) {
    const double a = 2.0 * std::numbers::pi * i / kCylinderSegments;
    return Vector3d(pose * Vector3d(rx * std::cos(a), ry * std::sin(a), z));
  };
  const Vector3d top = pose * Vector3d(0, 0, hz), bottom = pose * Vector3d(0, 0, -hz);
  for (int i = 0; i < kCylinderSegments; ++i) {
    const Vector3d a0 = rim(i, -hz), a1 = rim(i + 1, -hz);
    const Vector3d b0 = rim(i, hz), b1 = rim(i + 1, hz);
    AppendConvex(a0, a1, b1, center, albedo, out);
    AppendConvex(a0, b1, b0, center, albedo, out);
    AppendConvex(top, b0, b1, center, albedo, out);
    AppendConvex(bottom, a1, a0, center, albedo, out);
  }
}

void AppendSphere(const Eigen::Isometry3d& pose, const Vector3d& size,
                  const Vector3d& albedo, std::vector<Triangle>& out) {
  const Vector3d r = 0.5 * size;
  const Vector3d center = pose.translation();
  auto point = [&](int ring, int seg) {
    const double theta = std::numbers::pi * ring / kSphereRings;
    const double phi = 2.0 * std::numbers::pi * seg / kSphereSegments;
    return Vector3d(pose * Vector3d(r.x() * std::sin(theta) * std::cos(phi),
                                    r.y() * std::sin(theta) * std::sin(phi),
                                    r.z() * std::cos(theta)));
  };
  for (int ring = 0; ring < kSphereRings; ++ring) {
    for (int seg = 0; seg < kSphereSegments; ++seg) {
      const Vector3d p00 = point(ring, seg), p01 = point(ring, seg + 1);
      const Vector3d p10 = point(ring + 1, seg), p11 = point(ring + 1, seg + 1);
      AppendConvex(p00, p10, p11, center, albedo, out);
      AppendConvex(p00, p11, p01, center, albedo, out);
    }
  }
}

void AppendReceptacle(const RigidObject& body, std::vector<Triangle>& out) {
  const Eigen::Isometry3d pose = body.pose.ToIsometry();
  const Vector3d s = body.size;
  const double w = world::kReceptacleWall;
  auto part = [&](const Vector3d& offset, const Vector3d& size) {
    Eigen::Isometry3d p = pose;
    p.translation() = pose * offset;
    AppendBox(p, size, body.color, out);
  };
  part({0, 0, -0.5 * s.z() + 0.5 * w}, {s.x(), s.y(), w});
  part({0.5 * (s.x() - w), 0, 0}, {w, s.y(), s.z()});
  part({-0.5 * (s.x() - w), 0, 0}, {w, s.y(), s.z()});
  part({0, 0.5 * (s.y() - w), 0}, {s.x() - 2 * w, w, s.z()});
  part({0, -0.5 * (s.y() - w), 0}, {s.x() - 2 * w, w, s.z()});
}

double Edge(const Vector2d& a, const Vector2d& b, const Vector2d& p) {
  return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

// Sutherland-Hodgman against z >= near.
std::vector<Vector3d> ClipNear(const std::array<Vector3d, 3>& tri) {
  std::vector<Vector3d> out;
  for (int i = 0; i < 3; ++i) {
    const Vector3d& a = tri[i];
    const Vector3d& b = tri[(i + 1) % 3];
    const bool a_in = a.z() >= kNearPlane, b_in = b.z() >= kNearPlane;
    if (a_in) out.push_back(a);
    if (a_in != b_in) {
      const double t = (kNearPlane - a.z()) / (b.z() - a.z());
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

}  // namespace

double RadianceImage::Mean() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

Image Quantize(const RadianceImage& radiance) {
  Image img(radiance.width, radiance.height);
  for (size_t i = 0; i < radiance.values.size(); ++i) {
    const long v = std::lround(255.0 * radiance.values[i]);
    img.pixels[i] = static_cast<uint8_t>(std::clamp(v, 0L, 255L));
  }
  return img;
}

void AppendPrimitive(const RigidObject& body, std::vector<Triangle>& out) {
  if (body.role == world::ObjectRole::kReceptacle) {
    AppendReceptacle(body, out);
    return;
  }
  const Eigen::Isometry3d pose = body.pose.ToIsometry();
  switch (body.shape) {
    case Shape::kBox: AppendBox(pose, body.size, body.color, out); break;
    case Shape::kCylinder: AppendCylinder(pose, body.size, body.color, out); break;
    case Shape::kSphere: AppendSphere(pose, body.size, body.color, out); break;
  }
}

std::vector<RigidObject> ArmGeometry(const ArmView& view) {
  std::vector<RigidObject> parts;
  const auto frames = arm::JointFrames<double>(view.q, *view.params);
  const Eigen::Isometry3d tool = frames[arm::kNumJoints];
  auto add = [&](const Eigen::Isometry3d& pose, const Vector3d& size, double grey) {
    RigidObject o;
    o.id = "arm_part_" + std::to_string(parts.size());
    o.role = world::ObjectRole::kFixture;
    o.size = size;
    o.pose = arm::Pose::FromIsometry(pose);
    o.color = Vector3d::Constant(grey);
    parts.push_back(o);
  };

  std::vector<Vector3d> chain = {Vector3d::Zero()};
  for (int i = 0; i < arm::kNumJoints; ++i) chain.push_back(frames[i].translation());
  chain.push_back(tool * Vector3d(0, 0, -0.09));
  for (size_t i = 0; i + 1 < chain.size(); ++i) {
    const Vector3d d = chain[i + 1] - chain[i];
    if (d.norm() < 0.01) continue;
    Eigen::Isometry3d pose = Eigen::Isometry3d::Identity();
    pose.linear() = Eigen::Quaterniond::FromTwoVectors(Vector3d::UnitZ(), d).toRotationMatrix();
    pose.translation() = 0.5 * (chain[i] + chain[i + 1]);
    add(pose, {0.07, 0.07, d.norm()}, 0.85);
  }
  auto in_tool = [&](const Vector3d& offset) {
    Eigen::Isometry3d p = tool;
    p.translation() = tool * offset;
    return p;
  };
  add(in_tool({0, 0, -0.065}), {0.05, 0.2, 0.05}, 0.25);
  const double half_gap = 0.5 * view.aperture * view.params->gripper_max_width;
  add(in_tool({0, half_gap + 0.0075, -0.0225}), {0.02, 0.015, 0.045}, 0.3);
  add(in_tool({0, -half_gap - 0.0075, -0.0225}), {0.02, 0.015, 0.045}, 0.3);
  return parts;
}

std::vector<Triangle> Tessellate(const world::Scene& scene,
                                 const std::optional<ArmView>& arm) {
  std::vector<Triangle> tris;
  for (const auto& o : scene.objects) AppendPrimitive(o, tris);
  for (const auto& a : scene.articulated) {
    RigidObject body = a.base;
    body.pose = a.BodyPose();
    AppendPrimitive(body, tris);
    Eigen::Isometry3d handle = body.pose.ToIsometry();
    handle.translation() = a.HandlePoint();
    AppendBox(handle, {0.02, 0.1, 0.02}, Vector3d::Constant(0.2), tris);
    if (a.housing) AppendPrimitive(*a.housing, tris);
  }
  for (const auto& t : scene.toggles) {
    RigidObject body = t.base;
    if (t.toggled) body.color = 0.5 * (body.color + Vector3d::Ones());
    AppendPrimitive(body, tris);
  }
  if (arm) {
    for (const auto& part : ArmGeometry(*arm)) AppendPrimitive(part, tris);
  }
  return tris;
}

arm::Pose CameraWorldPose(const world::Camera& camera,
                          const std::optional<ArmView>& arm) {
  if (!camera.on_wrist) return camera.pose;
  if (!arm || !arm->params) {
    throw std::invalid_argument("camera '" + camera.name + "' is wrist-mounted; arm required");
  }
  const Eigen::Isometry3d tool = arm::EndEffectorTransform<double>(arm->q, *arm->params);
  return arm::Pose::FromIsometry(tool * camera.pose.ToIsometry());
}

RadianceImage Rasterize(const std::vector<Triangle>& triangles,
                        const std::vector<world::Light>& lights, double ambient,
                        const arm::Pose& camera_pose,
                        const world::CameraIntrinsics& k) {
  RadianceImage img;
  img.width = k.width;
  img.height = k.height;
  img.values.assign(static_cast<size_t>(k.width) * k.height * 3, ambient);
  std::vector<double> inv_depth(static_cast<size_t>(k.width) * k.height, 0.0);

  const Eigen::Matrix3d rot_t = camera_pose.orientation.toRotationMatrix().transpose();
  const Vector3d origin = camera_pose.position;

  for (const Triangle& tri : triangles) {
    Vector3d irradiance = Vector3d::Constant(ambient);
    for (const auto& light : lights) {
      const double lambert = std::max(0.0, tri.normal.dot(-light.direction));
      irradiance += light.intensity * lambert * light.color;
    }
    const Vector3d radiance = tri.albedo.cwiseProduct(irradiance);

    std::array<Vector3d, 3> cam;
    for (int i = 0; i < 3; ++i) cam[i] = rot_t * (tri.vertices[i] - origin);
    const std::vector<Vector3d> poly = ClipNear(cam);
    for (size_t f = 1; f + 1 < poly.size(); ++f) {
      const Vector3d* v[3] = {&poly[0], &poly[f], &poly[f + 1]};
      Vector2d s[3];
      double iz[3];
      for (int i = 0; i < 3; ++i) {
        iz[i] = 1.0 / v[i]->z();
        s[i] = {k.fx * v[i]->x() * iz[i] + k.cx, k.fy * v[i]->y() * iz[i] + k.cy};
      }
      const double area = Edge(s[0], s[1], s[2]);
      if (std::abs(area) < 1e-12) continue;
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min({s[0].x(), s[1].x(), s[2].x()}))));
      const int x1 = std::min(k.width - 1, static_cast<int>(std::ceil(std::max({s[0].x(), s[1].x(), s[2].x()}))));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min({s[0].y(), s[1].y(), s[2].y()}))));
      const int y1 = std::min(k.height - 1, static_cast<int>(std::ceil(std::max({s[0].y(), s[1].y(), s[2].y()}))));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const Vector2d p(x + 0.5, y + 0.5);
          double w0 = Edge(s[1], s[2], p), w1 = Edge(s[2], s[0], p), w2 = Edge(s[0], s[1], p);
          if (area < 0) {
            w0 = -w0;
            w1 = -w1;
            w2 = -w2;
          }
          if (w0 < 0 || w1 < 0 || w2 < 0) continue;
          const double a = std::abs(area);
          const double depth = (w0 * iz[0] + w1 * iz[1] + w2 * iz[2]) / a;
          const size_t idx = static_cast<size_t>(y) * k.width + x;
          if (depth <= inv_depth[idx]) continue;
          inv_depth[idx] = depth;
          for (int c = 0; c < 3; ++c) img.values[idx * 3 + c] = radiance(c);
        }
      }
    }
  }
  return img;
}

RadianceImage RenderRadiance(const world::Scene& scene, std::string_view camera,
                             const std::optional<ArmView>& arm) {
  const world::Camera* cam = scene.FindCamera(camera);
  if (!cam) throw std::invalid_argument("unknown camera '" + std::string(camera) + "'");
  return Rasterize(Tessellate(scene, arm), scene.lights, kAmbient,
                   CameraWorldPose(*cam, arm), cam->intrinsics);
}

Image Render(const world::Scene& scene, std::string_view camera,
             const std::optional<ArmView>& arm) {
  return Quantize(RenderRadiance(scene, camera, arm));
}

}  // namespace realm::render
