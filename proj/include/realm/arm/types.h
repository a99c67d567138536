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

#ifndef REALM_ARM_TYPES_H_
#define REALM_ARM_TYPES_H_

#include <array>
#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace realm::arm {

inline constexpr int kNumJoints = 7;
inline constexpr int kNumLinkTransforms = kNumJoints + 1;
inline constexpr int kActionSize = kNumJoints + 1;

template <typename Scalar>
using JointVectorT = Eigen::Matrix<Scalar, kNumJoints, 1>;
using JointVector = JointVectorT<double>;
using ActionVector = Eigen::Matrix<double, kActionSize, 1>;

// Rigid pose. The orientation is kept unit-norm by every producer.
struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  Eigen::Isometry3d ToIsometry() const {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.linear() = orientation.toRotationMatrix();
    t.translation() = position;
    return t;
  }

  static Pose FromIsometry(const Eigen::Isometry3d& t) {
    Pose p;
    p.position = t.translation();
    p.orientation = Eigen::Quaterniond(t.rotation()).normalized();
    return p;
  }

  // Rotation about world +z, in (-pi, pi].
  double Yaw() const {
    const Eigen::Quaterniond& q = orientation;
    return std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()),
                      1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
  }

  bool operator==(const Pose& o) const {
    return position == o.position && orientation.coeffs() == o.orientation.coeffs();
  }
};

struct ArmState {
  JointVector q = JointVector::Zero();
  JointVector qdot = JointVector::Zero();
  double gripper_aperture = 1.0;  // 1 = fully open
  double time = 0.0;

  bool operator==(const ArmState&) const = default;
};

struct ActionCommand {
  JointVector joint_targets = JointVector::Zero();
  double gripper_target = 1.0;

  ActionVector ToVector() const {
    ActionVector v;
    v << joint_targets, gripper_target;
    return v;
  }
  static ActionCommand FromVector(const ActionVector& v) {
    return {v.head<kNumJoints>(), v(kNumJoints)};
  }
  bool operator==(const ActionCommand&) const = default;
};

struct JointLimits {
  JointVector lower;
  JointVector upper;

  JointVector Clamp(const JointVector& q) const {
    return q.cwiseMax(lower).cwiseMin(upper);
  }
  bool Contains(const JointVector& q) const {
    return (q.array() >= lower.array()).all() &&
           (q.array() <= upper.array()).all();
  }
  bool operator==(const JointLimits&) const = default;
};

// Joint-space model of a 7-DoF arm under a PD position controller. The 14
// identifiable values are `friction` and `armature`; everything else is
// fixed platform data.
struct ArmParams {
  // Viscous friction per joint (N*m*s/rad). The Coulomb level is
  // coulomb_ratio * friction (N*m), so one scale per joint is identified.
  JointVector friction = JointVector::Zero();
  JointVector armature = JointVector::Zero();  // kg*m^2
  JointVector kp = JointVector::Ones();
  JointVector kd = JointVector::Zero();
  // Nominal joint-space inertia the armature is added to (kg*m^2).
  JointVector link_inertia = JointVector::Ones();
  JointLimits limits{JointVector::Constant(-3.0), JointVector::Constant(3.0)};
  // link_transforms[i] precedes the rotation of joint i about its local z;
  // the last one maps the joint-7 frame to the tool center point.
  std::array<Eigen::Isometry3d, kNumLinkTransforms> link_transforms = [] {
    std::array<Eigen::Isometry3d, kNumLinkTransforms> t;
    t.fill(Eigen::Isometry3d::Identity());
    return t;
  }();
  double coulomb_ratio = 0.1;
  double control_hz = 15.0;
  int substeps = 8;
  double gripper_slew = 4.0;        // aperture units per second
  double gripper_max_width = 0.08;  // m, at aperture 1

  double ControlDt() const { return 1.0 / control_hz; }
  double SubstepDt() const { return 1.0 / (control_hz * substeps); }

  // Throws std::invalid_argument when an invariant is violated.
  void Validate() const;

  bool operator==(const ArmParams& o) const {
    for (int i = 0; i < kNumLinkTransforms; ++i) {
      if (link_transforms[i].matrix() != o.link_transforms[i].matrix()) return false;
    }
    return friction == o.friction && armature == o.armature && kp == o.kp && kd == o.kd &&
           link_inertia == o.link_inertia && limits == o.limits &&
           coulomb_ratio == o.coulomb_ratio && control_hz == o.control_hz &&
           substeps == o.substeps && gripper_slew == o.gripper_slew &&
           gripper_max_width == o.gripper_max_width;
  }
};

}  // namespace realm::arm

#endif  // REALM_ARM_TYPES_H_
