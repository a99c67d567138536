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

#include "realm/arm/kinematics.h"

#include <algorithm>

#include <Eigen/Cholesky>

namespace realm::arm {

Pose ForwardKinematics(const JointVector& q, const ArmParams& params) {
  return Pose::FromIsometry(EndEffectorTransform<double>(q, params));
}

Eigen::Matrix<double, 6, kNumJoints> GeometricJacobian(const JointVector& q,
                                                       const ArmParams& params) {
  const auto frames = JointFrames<double>(q, params);
  const Eigen::Vector3d tool = frames[kNumJoints].translation();
  Eigen::Matrix<double, 6, kNumJoints> jac;
  for (int i = 0; i < kNumJoints; ++i) {
    const Eigen::Vector3d axis = frames[i].linear().col(2);
    jac.block<3, 1>(0, i) = axis.cross(tool - frames[i].translation());
    jac.block<3, 1>(3, i) = axis;
  }
  return jac;
}

Eigen::Vector3d OrientationError(const Eigen::Quaterniond& to,
                                 const Eigen::Quaterniond& from) {
  Eigen::Quaterniond d = to.normalized() * from.normalized().conjugate();
  if (d.w() < 0.0) d.coeffs() *= -1.0;
  const Eigen::Vector3d v = d.vec();
  const double s = v.norm();
  if (s < 1e-15) return 2.0 * v;  // small-angle limit
  return (2.0 * std::atan2(s, d.w()) / s) * v;
}

double ReachRadius(const ArmParams& params) {
  double r = 0.0;
  for (int i = 1; i < kNumLinkTransforms; ++i) {
    r += params.link_transforms[i].translation().norm();
  }
  return r;
}

IkResult InverseKinematics(const Pose& target, const JointVector& seed,
                           const ArmParams& params, const IkOptions& options) {
  IkResult result;
  result.q = params.limits.Clamp(seed);
  const Eigen::Vector3d shoulder = params.link_transforms[0].translation();
  if ((target.position - shoulder).norm() > ReachRadius(params)) {
    const Pose ee = ForwardKinematics(result.q, params);
    result.position_error = (target.position - ee.position).norm();
    result.orientation_error =
        OrientationError(target.orientation, ee.orientation).norm();
    return result;
  }

  const double lambda_sq = options.damping * options.damping;
  for (int it = 0;; ++it) {
    const Pose ee = ForwardKinematics(result.q, params);
    Eigen::Matrix<double, 6, 1> err;
    err.head<3>() = target.position - ee.position;
    err.tail<3>() = OrientationError(target.orientation, ee.orientation);
    result.iterations = it;
    result.position_error = err.head<3>().norm();
    result.orientation_error = err.tail<3>().norm();
    if (result.position_error < options.position_tolerance &&
        result.orientation_error < options.orientation_tolerance) {
      result.reachable = true;
      return result;
    }
    if (it == options.max_iterations) break;

    const auto jac = GeometricJacobian(result.q, params);
    const Eigen::Matrix<double, 6, 6> jjt =
        jac * jac.transpose() + lambda_sq * Eigen::Matrix<double, 6, 6>::Identity();
    JointVector dq = jac.transpose() * jjt.ldlt().solve(err);
    const double largest = dq.cwiseAbs().maxCoeff();
    if (largest > options.max_step) dq *= options.max_step / largest;
    result.q = params.limits.Clamp(result.q + dq);
  }
  return result;
}

}  // namespace realm::arm
