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

#ifndef REALM_ARM_KINEMATICS_H_
#define REALM_ARM_KINEMATICS_H_

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include "realm/arm/types.h"

namespace realm::arm {

template <typename Scalar>
using IsometryT = Eigen::Transform<Scalar, 3, Eigen::Isometry>;

// Frames of the revolute joints (after the preceding fixed transform, before
// the joint rotation) followed by the tool frame. frames[i].linear().col(2)
// is the rotation axis of joint i.
template <typename Scalar>
std::array<IsometryT<Scalar>, kNumLinkTransforms> JointFrames(
    const JointVectorT<Scalar>& q, const ArmParams& params) {
  std::array<IsometryT<Scalar>, kNumLinkTransforms> frames;
  IsometryT<Scalar> t = IsometryT<Scalar>::Identity();
  for (int i = 0; i < kNumJoints; ++i) {
    t = t * params.link_transforms[i].template cast<Scalar>();
    frames[i] = t;
    t = t * Eigen::AngleAxis<Scalar>(q(i), Eigen::Matrix<Scalar, 3, 1>::UnitZ());
  }
  frames[kNumJoints] = t * params.link_transforms[kNumJoints].template cast<Scalar>();
  return frames;
}

template <typename Scalar>
IsometryT<Scalar> EndEffectorTransform(const JointVectorT<Scalar>& q,
                                       const ArmParams& params) {
  return JointFrames<Scalar>(q, params)[kNumJoints];
}

Pose ForwardKinematics(const JointVector& q, const ArmParams& params);

// Rows 0-2 map joint rates to tool-point linear velocity, rows 3-5 to
// angular velocity, both in the world frame.
Eigen::Matrix<double, 6, kNumJoints> GeometricJacobian(const JointVector& q,
                                                       const ArmParams& params);

// Rotation vector taking `from` onto `to`, expressed in the world frame.
Eigen::Vector3d OrientationError(const Eigen::Quaterniond& to,
                                 const Eigen::Quaterniond& from);

struct IkOptions {
  double damping = 0.05;
  int max_iterations = 200;
  double position_tolerance = 1e-4;     // m
  double orientation_tolerance = 1e-3;  // rad
  double max_step = 0.2;                // rad per iteration, per joint
};

struct IkResult {
  JointVector q = JointVector::Zero();
  bool reachable = false;
  int iterations = 0;
  double position_error = 0.0;
  double orientation_error = 0.0;
};

// Upper bound on the distance from the first joint frame to the tool point.
double ReachRadius(const ArmParams& params);

// Damped least squares on the full 6-D pose error with per-iteration joint
// limit clamping. An unreachable target is reported, never thrown.
IkResult InverseKinematics(const Pose& target, const JointVector& seed,
                           const ArmParams& params,
                           const IkOptions& options = {});

}  // namespace realm::arm

#endif  // REALM_ARM_KINEMATICS_H_
