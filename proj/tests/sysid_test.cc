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

#include <mutex>
#include <cmath>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>
#include "realm/arm/dynamics.h"
#include "realm/arm/params_io.h"
#include "realm/common/rng.h"
#include "realm/sysid/sysid.h"

namespace realm::sysid {
namespace {

using Eigen::VectorXd;

double Sphere(const VectorXd& x) { return x.squaredNorm(); }

double Rosenbrock(const VectorXd& x) {
  double f = 0.0;
  for (int i = 0; i + 1 < x.size(); ++i) {
    f += 100.0 * std::pow(x(i + 1) - x(i) * x(i), 2) + std::pow(1.0 - x(i), 2);
  }
  return f;
}

TEST(CmaEsTest, PopulationSizeFormula) { EXPECT_EQ(DefaultPopulationSize(14), 11); }

TEST(CmaEsTest, SolvesSphere) {
  CmaEsOptions o;
  o.budget = 6000;
  o.seed = 1;
  o.init_sigma = 1.0;
  const auto r = CmaEsMinimize(Sphere, VectorXd::Constant(14, 3.0), o);
  EXPECT_LT(r.value, 1e-10);
  EXPECT_LE(r.evaluations, 6000);
}

TEST(CmaEsTest, SolvesRosenbrock) {
  CmaEsOptions o;
  o.budget = 60000;
  o.seed = 2;
  const auto r = CmaEsMinimize(Rosenbrock, VectorXd::Zero(14), o);
  EXPECT_LT(r.value, 1e-6);
  EXPECT_LE(r.evaluations, 60000);
}

TEST(CmaEsTest, DeterministicAndShiftInvariant) {
  auto run = [](double shift, int workers) {
    std::vector<VectorXd> seen;
    std::mutex m;
    CmaEsOptions o;
    o.budget = 1100;
    o.seed = 9;
    o.workers = workers;
    const auto r = CmaEsMinimize(
        [&](const VectorXd& x) {
          std::lock_guard lock(m);
          seen.push_back(x);
          return Rosenbrock(x) + shift;
        },
        VectorXd::Constant(14, -0.5), o);
    return std::make_pair(r, seen);
  };
  const auto [a, seen_a] = run(0.0, 1);
  const auto [b, seen_b] = run(0.0, 1);
  const auto [c, seen_c] = run(1000.0, 1);
  EXPECT_EQ(seen_a, seen_b);
  EXPECT_EQ(seen_a, seen_c);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.value, b.value);
  const auto [d, seen_d] = run(0.0, 3);
  EXPECT_EQ(a.x, d.x);
  EXPECT_EQ(a.trace, d.trace);
}

TEST(CmaEsTest, RejectsBudgetBelowPopulation) {
  CmaEsOptions o;
  o.budget = 10;
  EXPECT_THROW(CmaEsMinimize(Sphere, VectorXd::Zero(14), o), std::invalid_argument);
}

TEST(AnnealTest, KeepsStrictLocalMinimum) {
  const VectorXd start = VectorXd::LinSpaced(14, -1.0, 1.0);
  const auto r = AnnealRefine([&](const VectorXd& x) { return (x - start).squaredNorm(); },
                              start, {});
  EXPECT_EQ(r.x, start);
  EXPECT_EQ(r.value, 0.0);
}

TEST(AnnealTest, ImprovesQuadraticMonotonically) {
  const VectorXd start = VectorXd::Constant(14, 0.1);
  const auto r = AnnealRefine(Sphere, start, {});
  EXPECT_LT(r.value, Sphere(start));
  ASSERT_EQ(r.trace.size(), 6u);
  for (size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
  EXPECT_EQ(r.evaluations, 1 + 6 * 200);
}

class SysIdTest : public ::testing::Test {
 protected:
  void SetUp() override {
    base_ = arm::LoadArmParams(std::string(REALM_DATA_DIR) + "/arm/droid_panda.json");
    home_ << 0.0, -std::numbers::pi / 4, 0.0, -3 * std::numbers::pi / 4, 0.0,
        std::numbers::pi / 2, std::numbers::pi / 4;
  }
  arm::ArmParams Truth(uint64_t seed) const {
    CounterRng rng(seed);
    arm::ArmParams t = base_;
    for (int j = 0; j < arm::kNumJoints; ++j) t.friction(j) *= std::exp2(rng.Uniform(-1, 1));
    for (int j = 0; j < arm::kNumJoints; ++j) t.armature(j) *= std::exp2(rng.Uniform(-1, 1));
    return t;
  }
  arm::ArmParams base_;
  arm::JointVector home_;
};

TEST_F(SysIdTest, EncodeDecodeRoundTrip) {
  const arm::ArmParams p = DecodeParams(EncodeParams(base_), base_);
  EXPECT_TRUE(p.friction.isApprox(base_.friction, 1e-15));
  EXPECT_TRUE(p.armature.isApprox(base_.armature, 1e-15));
  ParamVector x = ParamVector::Constant(-800.0);
  const arm::ArmParams tiny = DecodeParams(x, base_);
  EXPECT_GE(tiny.friction.minCoeff(), 0.0);
  EXPECT_GE(tiny.armature.minCoeff(), 0.0);
}

TEST_F(SysIdTest, LossIsZeroOnSelfGeneratedData) {
  const arm::ArmParams truth = Truth(3);
  const SysIdDataset data = SyntheticDataset(truth, home_, 3, 150, 7);
  EXPECT_LE(AlignmentLoss(EncodeParams(truth), data, base_), 1e-18);
  EXPECT_GT(AlignmentLoss(EncodeParams(base_), data, base_), 1e-6);
}

TEST_F(SysIdTest, HandExampleResidual) {
  TrajectoryPair pair;
  pair.initial_state.q = home_;
  pair.commands = {{home_, 1.0}};
  pair.q_real = {home_};
  pair.q_real[0](0) += 0.1;
  EXPECT_NEAR(AlignmentLoss(EncodeParams(base_), {{pair}}, base_), 0.01, 1e-15);
}

TEST_F(SysIdTest, LossIgnoresPairOrder) {
  SysIdDataset data = SyntheticDataset(Truth(4), home_, 3, 40, 1);
  const double a = AlignmentLoss(EncodeParams(base_), data, base_);
  std::swap(data.pairs[0], data.pairs[2]);
  EXPECT_NEAR(AlignmentLoss(EncodeParams(base_), data, base_), a, 1e-12 * a);
}

TEST_F(SysIdTest, UnstableCandidateIsPenalized) {
  const SysIdDataset data = SyntheticDataset(base_, home_, 1, 20, 1);
  ParamVector x = EncodeParams(base_);
  x.tail<7>().setConstant(-800.0);  // decodes to exactly zero armature
  base_.link_inertia.setConstant(0.0);
  EXPECT_EQ(AlignmentLoss(x, data, base_), kInstabilityPenalty);
}

TEST_F(SysIdTest, RecoversSyntheticGroundTruth) {
  const arm::ArmParams truth = Truth(11);
  const SysIdDataset data = SyntheticDataset(truth, home_, 3, 150, 5);
  IdentifyOptions o;
  o.seed = 3;
  const IdentifyResult r = Identify(data, base_, o);
  EXPECT_LT(r.final_loss, 1e-3);
  EXPECT_LE(r.final_loss, r.cma_loss);
  EXPECT_LE(r.cma_loss, r.init_loss);
  for (int j = 0; j < arm::kNumJoints; ++j) {
    EXPECT_NEAR(r.params.friction(j) / truth.friction(j), 1.0, 0.05) << "friction " << j;
    EXPECT_NEAR(r.params.armature(j) / truth.armature(j), 1.0, 0.05) << "armature " << j;
  }
}

TEST_F(SysIdTest, ZeroMotionReturnsInitialParameters) {
  TrajectoryPair pair;
  pair.initial_state.q = home_;
  pair.commands.assign(30, {home_, 1.0});
  pair.q_real.assign(30, home_);
  IdentifyOptions o;
  o.cma_budget = 500;
  const IdentifyResult r = Identify({{pair}}, base_, o);
  EXPECT_EQ(r.final_loss, 0.0);
  const arm::ArmParams init = DecodeParams(EncodeParams(base_), base_);
  EXPECT_EQ(r.params.friction, init.friction);
  EXPECT_EQ(r.params.armature, init.armature);
}

TEST_F(SysIdTest, DatasetRoundTripsThroughDirectory) {
  const SysIdDataset data = SyntheticDataset(Truth(2), home_, 2, 10, 4);
  const auto dir = std::filesystem::temp_directory_path() / "realm_sysid_test";
  std::filesystem::remove_all(dir);
  SaveDataset(data, dir);
  const SysIdDataset back = LoadDataset(dir);
  ASSERT_EQ(back.pairs.size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.pairs[i].commands, data.pairs[i].commands);
    EXPECT_EQ(back.pairs[i].q_real, data.pairs[i].q_real);
    EXPECT_EQ(back.pairs[i].initial_state, data.pairs[i].initial_state);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace realm::sysid
