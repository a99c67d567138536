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

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>
#include "realm/arm/dynamics.h"
#include "realm/arm/kinematics.h"
#include "realm/arm/params_io.h"
#include "realm/common/rng.h"

namespace realm::arm {
namespace {

ArmParams DefaultParams() {
  return LoadArmParams(std::string(REALM_DATA_DIR) + "/arm/droid_panda.json");
}

JointVector Home() {
  JointVector q;
  q << 0.0, -std::numbers::pi / 4, 0.0, -3 * std::numbers::pi / 4, 0.0,
      std::numbers::pi / 2, std::numbers::pi / 4;
  return q;
}

JointVector RandomConfig(CounterRng& rng, const ArmParams& p, double spread) {
  JointVector q = Home();
  for (int j = 0; j < kNumJoints; ++j) q(j) += rng.Uniform(-spread, spread);
  return p.limits.Clamp(q);
}

TEST(ArmStep, RestIsFixedPoint) {
  const ArmParams p = DefaultParams();
  ArmState s;
  s.q = Home();
  ActionCommand cmd{Home(), s.gripper_aperture};
  ArmState next = s;
  for (int i = 0; i < 10000; ++i) next = Step(next, p, cmd, p.SubstepDt());
  EXPECT_EQ(next.q, s.q);
  EXPECT_EQ(next.qdot, JointVector::Zero());
  EXPECT_EQ(next.gripper_aperture, s.gripper_aperture);
}

// Closed-form response of M x'' = -kp x - kd x' at critical damping:
// x(t) = (x0 + (v0 + w x0) t) exp(-w t), w = sqrt(kp / M).
TEST(ArmStep, CriticallyDampedMatchesClosedForm) {
  ArmParams p = DefaultParams();
  p.friction.setZero();
  p.armature.setZero();
  const int joint = 3;
  const double inertia = p.link_inertia(joint);
  p.kd(joint) = 2.0 * std::sqrt(p.kp(joint) * inertia);
  const double w = std::sqrt(p.kp(joint) / inertia);

  ArmState s;
  s.q = Home();
  const double x0 = 0.2;
  ActionCommand cmd{Home(), 1.0};
  cmd.joint_targets(joint) -= x0;

  const double dt = 2e-7;
  const int steps = static_cast<int>(std::lround(1.0 / dt));
  double worst = 0.0;
  for (int i = 1; i <= steps; ++i) {
    s = Step(s, p, cmd, dt);
    if (i % 1000 == 0) {
      const double t = i * dt;
      const double x = x0 * (1.0 + w * t) * std::exp(-w * t);
      const double sim = s.q(joint) - cmd.joint_targets(joint);
      worst = std::max(worst, std::abs(sim - x));
    }
  }
  EXPECT_LT(worst, 1e-6);
  // Other joints never move.
  for (int j = 0; j < kNumJoints; ++j) {
    if (j != joint) EXPECT_EQ(s.q(j), Home()(j));
  }
}

TEST(ArmStep, Deterministic) {
  const ArmParams p = DefaultParams();
  CounterRng rng(7);
  ArmState s;
  s.q = Home();
  s.qdot = JointVector::Constant(0.3);
  const ActionCommand cmd{RandomConfig(rng, p, 0.5), 0.0};
  ArmState a = s, b = s;
  for (int i = 0; i < 500; ++i) {
    a = Step(a, p, cmd, p.SubstepDt());
    b = Step(b, p, cmd, p.SubstepDt());
  }
  EXPECT_EQ(a, b);
}

TEST(ArmStep, RejectsNonFiniteState) {
  const ArmParams p = DefaultParams();
  ArmState s;
  s.q = Home();
  s.qdot(2) = std::nan("");
  EXPECT_THROW(Step(s, p, {Home(), 1.0}, p.SubstepDt()), std::invalid_argument);
  EXPECT_THROW(Step(ArmState{}, p, {Home(), 1.0}, 0.0), std::invalid_argument);
}

TEST(ArmStep, GripperSlewsAtFixedRate) {
  const ArmParams p = DefaultParams();
  ArmState s;
  s.q = Home();
  s.gripper_aperture = 1.0;
  s = Step(s, p, {Home(), 0.0}, 0.05);
  EXPECT_NEAR(s.gripper_aperture, 1.0 - p.gripper_slew * 0.05, 1e-15);
  for (int i = 0; i < 100; ++i) s = Step(s, p, {Home(), -3.0}, 0.05);
  EXPECT_EQ(s.gripper_aperture, 0.0);
}

TEST(ArmStep, ViscousFrictionNeverIncreasesSpeed) {
  ArmParams p = DefaultParams();
  CounterRng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    ArmState s;
    s.q = RandomConfig(rng, p, 0.8);
    for (int j = 0; j < kNumJoints; ++j) s.qdot(j) = rng.Uniform(-2.0, 2.0);
    const ActionCommand cmd{RandomConfig(rng, p, 0.8), 1.0};
    const int j = static_cast<int>(rng.UniformInt(kNumJoints));
    const double base = rng.Uniform(0.0, 10.0);
    ArmParams lo = p, hi = p;
    lo.friction(j) = base;
    hi.friction(j) = base + rng.Uniform(0.0, 10.0);
    const double v_lo = Step(s, lo, cmd, p.SubstepDt()).qdot(j);
    const double v_hi = Step(s, hi, cmd, p.SubstepDt()).qdot(j);
    EXPECT_LE(std::abs(v_hi), std::abs(v_lo));
  }
}

TEST(ArmStep, StaysWithinJointLimits) {
  const ArmParams p = DefaultParams();
  CounterRng rng(3);
  ArmState s;
  s.q = Home();
  for (int i = 0; i < 3000; ++i) {
    ActionCommand cmd;
    for (int j = 0; j < kNumJoints; ++j) cmd.joint_targets(j) = rng.Uniform(-6.0, 6.0);
    s = Step(s, p, cmd, p.SubstepDt());
    ASSERT_TRUE(p.limits.Contains(s.q)) << "step " << i;
  }
}

TEST(Replay, HoldingInitialPoseIsStationary) {
  const ArmParams p = DefaultParams();
  ArmState s;
  s.q = Home();
  const std::vector<ActionCommand> cmds(40, ActionCommand{Home(), 1.0});
  const auto qs = ReplayTrajectory(s, p, cmds, p.control_hz, p.substeps);
  ASSERT_EQ(qs.size(), cmds.size());
  for (const auto& q : qs) EXPECT_EQ(q, Home());
  EXPECT_TRUE(ReplayTrajectory(s, p, {}, p.control_hz, p.substeps).empty());
}

TEST(Replay, LargerArmatureSlowsFirstTick) {
  const ArmParams p = DefaultParams();
  ArmState s;
  s.q = Home();
  ActionCommand target{Home() + JointVector::Constant(0.3), 1.0};
  target.joint_targets = p.limits.Clamp(target.joint_targets);
  const std::vector<ActionCommand> cmds(5, target);
  double previous = -1.0;
  for (double scale : {1.0, 2.0, 4.0}) {
    ArmParams scaled = p;
    scaled.armature *= scale;
    const auto qs = ReplayTrajectory(s, scaled, cmds, p.control_hz, p.substeps);
    const double err = (target.joint_targets - qs.front()).norm();
    EXPECT_GE(err, previous);
    previous = err;
  }
}

TEST(Replay, Deterministic) {
  const ArmParams p = DefaultParams();
  CounterRng rng(5);
  ArmState s;
  s.q = Home();
  std::vector<ActionCommand> cmds;
  for (int i = 0; i < 60; ++i) cmds.push_back({RandomConfig(rng, p, 0.4), 1.0});
  EXPECT_EQ(ReplayTrajectory(s, p, cmds, 15.0, 8),
            ReplayTrajectory(s, p, cmds, 15.0, 8));
}

// Independent modified-DH oracle on raw row-major 4x4 arrays.
using Mat4 = std::array<double, 16>;

Mat4 MatMul(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k)
      for (int cc = 0; cc < 4; ++cc) c[4 * r + cc] += a[4 * r + k] * b[4 * k + cc];
  return c;
}

Mat4 ModifiedDh(double a, double d, double alpha, double theta) {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double ct = std::cos(theta), st = std::sin(theta);
  return {ct,      -st,      0,   a,  //
          st * ca, ct * ca,  -sa, -sa * d,
          st * sa, ct * sa,  ca,  ca * d,
          0,       0,        0,   1};
}

std::array<double, 3> OraclePosition(const JointVector& q) {
  const double h = std::numbers::pi / 2;
  const double a[] = {0, 0, 0, 0.0825, -0.0825, 0, 0.088};
  const double d[] = {0.333, 0, 0.316, 0, 0.384, 0, 0};
  const double alpha[] = {0, -h, h, h, -h, h, h};
  Mat4 t = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  for (int i = 0; i < 7; ++i) t = MatMul(t, ModifiedDh(a[i], d[i], alpha[i], q(i)));
  t = MatMul(t, ModifiedDh(0, 0.2104, 0, -std::numbers::pi / 4));
  return {t[3], t[7], t[11]};
}

TEST(ForwardKinematics, ZeroConfigurationIsLinkProduct) {
  const ArmParams p = DefaultParams();
  Eigen::Isometry3d product = Eigen::Isometry3d::Identity();
  for (const auto& t : p.link_transforms) product = product * t;
  const Pose pose = ForwardKinematics(JointVector::Zero(), p);
  EXPECT_TRUE(pose.position.isApprox(product.translation(), 1e-15));
  EXPECT_LT(OrientationError(pose.orientation, Eigen::Quaterniond(product.rotation())).norm(),
            1e-12);
}

TEST(ForwardKinematics, MatchesIndependentTransformChain) {
  const ArmParams p = DefaultParams();
  CounterRng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    JointVector q;
    for (int j = 0; j < kNumJoints; ++j)
      q(j) = rng.Uniform(p.limits.lower(j), p.limits.upper(j));
    const Pose pose = ForwardKinematics(q, p);
    const auto oracle = OraclePosition(q);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(pose.position(k), oracle[k], 1e-9);
    EXPECT_NEAR(pose.orientation.norm(), 1.0, 1e-9);
  }
}

TEST(ForwardKinematics, LastJointRotatesAboutToolPoint) {
  const ArmParams p = DefaultParams();
  CounterRng rng(1);
  const JointVector q = RandomConfig(rng, p, 0.5);
  JointVector q2 = q;
  q2(6) += 1.1;
  EXPECT_LT((ForwardKinematics(q, p).position - ForwardKinematics(q2, p).position).norm(),
            1e-12);
}

TEST(ForwardKinematics, JacobianMatchesFiniteDifferences) {
  const ArmParams p = DefaultParams();
  const JointVector q = Home();
  const auto jac = GeometricJacobian(q, p);
  const double h = 1e-6;
  for (int j = 0; j < kNumJoints; ++j) {
    JointVector qp = q, qm = q;
    qp(j) += h;
    qm(j) -= h;
    const Eigen::Vector3d dv =
        (ForwardKinematics(qp, p).position - ForwardKinematics(qm, p).position) / (2 * h);
    EXPECT_LT((dv - jac.block<3, 1>(0, j)).norm(), 1e-8) << "joint " << j;
  }
}

TEST(InverseKinematics, TargetAtSeedNeedsNoIterations) {
  const ArmParams p = DefaultParams();
  const IkResult r = InverseKinematics(ForwardKinematics(Home(), p), Home(), p);
  EXPECT_TRUE(r.reachable);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.q, Home());
}

TEST(InverseKinematics, FiveCentimetresAbove) {
  const ArmParams p = DefaultParams();
  Pose target = ForwardKinematics(Home(), p);
  target.position.z() += 0.05;
  const IkResult r = InverseKinematics(target, Home(), p);
  ASSERT_TRUE(r.reachable);
  EXPECT_LT((ForwardKinematics(r.q, p).position - target.position).norm(), 1e-4);
  EXPECT_TRUE(p.limits.Contains(r.q));
}

TEST(InverseKinematics, FarTargetIsUnreachable) {
  const ArmParams p = DefaultParams();
  Pose target = ForwardKinematics(Home(), p);
  target.position += Eigen::Vector3d(10.0, 0.0, 0.0);
  const IkResult r = InverseKinematics(target, Home(), p);
  EXPECT_FALSE(r.reachable);
}

TEST(InverseKinematics, RoundTripOnReachableTargets) {
  const ArmParams p = DefaultParams();
  CounterRng rng(21);
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const JointVector goal = RandomConfig(rng, p, 0.35);
    const Pose target = ForwardKinematics(goal, p);
    const IkResult r = InverseKinematics(target, Home(), p);
    if (!r.reachable) continue;
    ++solved;
    EXPECT_LT((ForwardKinematics(r.q, p).position - target.position).norm(), 1e-4);
  }
  EXPECT_GE(solved, 95);
}

TEST(ArmParamsIo, JsonRoundTripIsExact) {
  const ArmParams p = DefaultParams();
  const ArmParams back = ArmParamsFromJson(Json::parse(ArmParamsToJson(p).dump()));
  EXPECT_EQ(back.friction, p.friction);
  EXPECT_EQ(back.armature, p.armature);
  for (int i = 0; i < kNumLinkTransforms; ++i)
    EXPECT_EQ(back.link_transforms[i].matrix(), p.link_transforms[i].matrix());
  Json bad = ArmParamsToJson(p);
  bad["friction"][0] = -1.0;
  EXPECT_THROW(ArmParamsFromJson(bad), std::invalid_argument);
}

}  // namespace
}  // namespace realm::arm
