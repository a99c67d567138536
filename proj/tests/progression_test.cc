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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>
#include "realm/arm/params_io.h"
#include "realm/progression/progression.h"
#include "realm/world/scene_io.h"

namespace realm::progression {
namespace {

using Eigen::Vector3d;
using world::Skill;
using world::WorldState;

class ProgressionTest : public ::testing::Test {
 protected:
  void SetUp() override {
    params_ = arm::LoadArmParams(std::string(REALM_DATA_DIR) + "/arm/droid_panda.json");
  }

  WorldState Initial(const std::string& task_name) {
    task_ = world::LoadTaskSpec(std::string(REALM_DATA_DIR) + "/tasks/" + task_name + ".json");
    arm::ArmState a;
    a.q << 0.0, -std::numbers::pi / 4, 0.0, -3 * std::numbers::pi / 4, 0.0,
        std::numbers::pi / 2, std::numbers::pi / 4;
    WorldState s = world::MakeWorld(world::LoadScene(task_.scene_path), a, params_);
    s.tool.position = Vector3d(0.0, 0.0, 1.0);  // far from everything
    return s;
  }

  // Appends a copy of `s` with time advanced by one control tick.
  void Push(std::vector<WorldState>& trace, WorldState s) {
    s.arm.time = trace.empty() ? 0.0 : trace.back().arm.time + 1.0 / 15.0;
    s.step_index = static_cast<int>(trace.size());
    trace.push_back(std::move(s));
  }

  ProgressionResult Score(const std::vector<WorldState>& trace) {
    return ScoreTrace(trace, task_, RubricFor(task_.skill));
  }

  arm::ArmParams params_;
  world::TaskSpec task_;
};

TEST(RubricTest, StageCountsAndOrder) {
  using V = std::vector<std::string>;
  EXPECT_EQ(RubricFor(Skill::kPut).stages, (V{"Reach", "Grasp", "Lift", "Move Close", "IsInside"}));
  EXPECT_EQ(RubricFor(Skill::kPick).stages, (V{"Reach", "Grasp", "Lift"}));
  EXPECT_EQ(RubricFor(Skill::kStack).stages, (V{"Reach", "Grasp", "Lift", "Move Close", "IsOnTop"}));
  EXPECT_EQ(RubricFor(Skill::kPush).stages, (V{"Reach", "Touch", "IsToggledOn"}));
  EXPECT_EQ(RubricFor(Skill::kRotate).stages, (V{"Reach", "Grasp", "Rotate 45"}));
  EXPECT_EQ(RubricFor(Skill::kOpen).stages,
            (V{"Reach", "Touch & Move", "Open 50%", "Open 75%", "Open 95%"}));
  EXPECT_EQ(RubricFor(Skill::kClose).stages,
            (V{"Reach", "Touch & Move", "Closed 50%", "Closed 75%", "Closed 95%"}));
}

TEST_F(ProgressionTest, PickReachOnlyScoresOneThird) {
  WorldState s = Initial("pick_can");
  std::vector<WorldState> trace;
  Push(trace, s);
  s.tool.position = s.scene.FindObject("yellow_can")->pose.position + Vector3d(0, 0, 0.03);
  for (int i = 0; i < 5; ++i) Push(trace, s);
  const ProgressionResult r = Score(trace);
  EXPECT_EQ(r.stages_achieved, 1);
  EXPECT_DOUBLE_EQ(r.score, 1.0 / 3.0);
  EXPECT_FALSE(r.success);
  EXPECT_FALSE(r.duration_to_success.has_value());
}

TEST_F(ProgressionTest, OpenAtEightyPercentScoresFourFifths) {
  WorldState s = Initial("open_drawer");
  std::vector<WorldState> trace;
  Push(trace, s);
  auto* drawer = s.scene.FindArticulated("drawer");
  for (double f : {0.0, 0.2, 0.5, 0.8, 0.8, 0.8, 0.8}) {
    drawer->SetPosition(drawer->range_min + f * (drawer->range_max - drawer->range_min));
    s.tool.position = drawer->HandlePoint();
    Push(trace, s);
  }
  const ProgressionResult r = Score(trace);
  EXPECT_EQ(r.stages_achieved, 4);
  EXPECT_DOUBLE_EQ(r.score, 0.8);
}

TEST_F(ProgressionTest, CloseCountsDownFromOpen) {
  WorldState s = Initial("close_drawer");
  std::vector<WorldState> trace;
  Push(trace, s);
  auto* drawer = s.scene.FindArticulated("drawer");
  for (double f : {1.0, 0.9, 0.5, 0.25, 0.05, 0.0}) {
    drawer->SetPosition(drawer->range_min + f * (drawer->range_max - drawer->range_min));
    s.tool.position = drawer->HandlePoint();
    Push(trace, s);
  }
  const ProgressionResult r = Score(trace);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.stages_achieved, 5);
}

TEST_F(ProgressionTest, GraspBeforeReachIsNotCredited) {
  WorldState s = Initial("pick_can");
  std::vector<WorldState> trace;
  Push(trace, s);
  // Attachment and lift without the tool ever near: only impossible in the
  // simulator, but the scorer must still respect stage order.
  s.attachment = world::Attachment{"yellow_can", Eigen::Isometry3d::Identity()};
  s.scene.FindObject("yellow_can")->pose.position.z() += 0.1;
  for (int i = 0; i < 3; ++i) Push(trace, s);
  EXPECT_EQ(Score(trace).stages_achieved, 0);
  s.tool.position = s.scene.FindObject("yellow_can")->pose.position;
  for (int i = 0; i < 3; ++i) Push(trace, s);
  const ProgressionResult r = Score(trace);
  EXPECT_TRUE(r.success);
  ASSERT_EQ(r.stage_times.size(), 3u);
  for (size_t i = 1; i < r.stage_times.size(); ++i) EXPECT_LT(r.stage_times[i - 1], r.stage_times[i]);
  EXPECT_DOUBLE_EQ(*r.duration_to_success, r.stage_times.back());
}

TEST_F(ProgressionTest, PutFullSequence) {
  WorldState s = Initial("put_cube_in_bowl");
  std::vector<WorldState> trace;
  Push(trace, s);
  auto* cube = s.scene.FindObject("red_cube");
  const auto* bowl = s.scene.FindObject("blue_bowl");
  s.tool.position = cube->pose.position;
  Push(trace, s);
  s.attachment = world::Attachment{"red_cube", Eigen::Isometry3d::Identity()};
  Push(trace, s);
  cube->pose.position.z() += 0.08;
  s.tool.position = cube->pose.position;
  Push(trace, s);
  cube->pose.position.head<2>() = bowl->pose.position.head<2>();
  s.tool.position = cube->pose.position;
  Push(trace, s);
  EXPECT_EQ(Score(trace).stages_achieved, 4);
  s.attachment.reset();
  cube->pose.position.z() = bowl->Bottom() + world::kReceptacleWall + cube->HalfHeight();
  Push(trace, s);
  EXPECT_TRUE(Score(trace).success);

  // Score of every prefix is non-decreasing and quantized.
  double prev = 0.0;
  for (size_t n = 1; n <= trace.size(); ++n) {
    const ProgressionResult r =
        ScoreTrace(std::span(trace).first(n), task_, RubricFor(task_.skill));
    EXPECT_GE(r.score, prev);
    EXPECT_DOUBLE_EQ(r.score * 5, std::round(r.score * 5));
    EXPECT_EQ(r.success, r.stages_achieved == r.stage_count);
    prev = r.score;
  }
}

TEST_F(ProgressionTest, StackNeedsReleaseOnTop) {
  WorldState s = Initial("stack_block_on_box");
  std::vector<WorldState> trace;
  Push(trace, s);
  auto* block = s.scene.FindObject("orange_block");
  const auto* box = s.scene.FindObject("purple_box");
  s.tool.position = block->pose.position;
  Push(trace, s);
  s.attachment = world::Attachment{"orange_block", Eigen::Isometry3d::Identity()};
  Push(trace, s);
  block->pose.position = box->pose.position + Vector3d(0.01, 0, box->HalfHeight() + block->HalfHeight());
  Push(trace, s);
  Push(trace, s);
  Push(trace, s);  // still held: not on top yet
  EXPECT_EQ(Score(trace).stages_achieved, 4);
  s.attachment.reset();
  Push(trace, s);
  EXPECT_TRUE(Score(trace).success);
}

TEST_F(ProgressionTest, PushCreditsToggle) {
  WorldState s = Initial("push_button");
  std::vector<WorldState> trace;
  Push(trace, s);
  auto& button = s.scene.toggles.front();
  s.tool.position = button.base.pose.position + Vector3d(0, 0, button.base.HalfHeight() + 0.01);
  Push(trace, s);
  Push(trace, s);
  EXPECT_EQ(Score(trace).stages_achieved, 2);
  button.toggled = true;
  Push(trace, s);
  EXPECT_TRUE(Score(trace).success);
}

TEST_F(ProgressionTest, RotateNeedsFortyFiveDegreesWhileHeld) {
  WorldState s = Initial("rotate_mug");
  std::vector<WorldState> trace;
  Push(trace, s);
  auto* mug = s.scene.FindObject("white_mug");
  s.tool.position = mug->pose.position;
  Push(trace, s);
  s.attachment = world::Attachment{"white_mug", Eigen::Isometry3d::Identity()};
  Push(trace, s);
  const Eigen::Quaterniond q0 = mug->pose.orientation;
  mug->pose.orientation = Eigen::AngleAxisd(44.0 * std::numbers::pi / 180, Vector3d::UnitZ()) * q0;
  Push(trace, s);
  EXPECT_EQ(Score(trace).stages_achieved, 2);
  mug->pose.orientation = Eigen::AngleAxisd(-46.0 * std::numbers::pi / 180, Vector3d::UnitZ()) * q0;
  Push(trace, s);
  EXPECT_TRUE(Score(trace).success);
}

TEST_F(ProgressionTest, RejectsMismatchAndEmptyTrace) {
  WorldState s = Initial("pick_can");
  std::vector<WorldState> trace{s};
  EXPECT_THROW(ScoreTrace(trace, task_, RubricFor(Skill::kPut)), std::invalid_argument);
  EXPECT_THROW(ScoreTrace({}, task_, RubricFor(Skill::kPick)), std::invalid_argument);
}

TEST(ThresholdsTest, ShippedConfigMatchesDefaultsAndRoundTrips) {
  const Thresholds shipped =
      LoadThresholds(std::string(REALM_DATA_DIR) + "/config/progression.json");
  EXPECT_EQ(shipped, Thresholds{});
  EXPECT_EQ(ThresholdsFromJson(ThresholdsToJson(shipped)), shipped);
}

TEST(SurfaceDistanceTest, BoxDistance) {
  world::RigidObject o;
  o.size = {0.2, 0.1, 0.1};
  o.pose.orientation = Eigen::AngleAxisd(std::numbers::pi / 2, Vector3d::UnitZ());
  EXPECT_DOUBLE_EQ(SurfaceDistance(o, {0, 0, 0}), 0.0);
  EXPECT_NEAR(SurfaceDistance(o, {0.1, 0, 0}), 0.05, 1e-12);
  EXPECT_NEAR(SurfaceDistance(o, {0, 0.15, 0}), 0.05, 1e-12);
}

}  // namespace
}  // namespace realm::progression
