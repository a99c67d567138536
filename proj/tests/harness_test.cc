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
#include <stdexcept>

#include <gtest/gtest.h>
#include "harness_test_util.h"
#include "realm/arm/kinematics.h"

namespace realm::harness {
namespace {

using test_util::AllTasks;
using test_util::Config;
using test_util::RunTask;
using test_util::Task;

class ExpertOnTask : public ::testing::TestWithParam<std::string> {};

TEST_P(ExpertOnTask, SucceedsWithFullProgression) {
  ExpertPolicy expert;
  const RolloutRecord r = RunTask(Task(GetParam()), expert, 0);
  EXPECT_EQ(r.status, EpisodeStatus::kSuccess) << r.message;
  EXPECT_TRUE(r.progression.success);
  EXPECT_EQ(r.progression.score, 1.0);
  EXPECT_FALSE(expert.failed());
  EXPECT_LE(static_cast<int>(r.steps.size()), r.task.max_steps);
}

std::vector<std::string> TaskIds() {
  std::vector<std::string> ids;
  for (const auto& t : AllTasks()) ids.push_back(t.id);
  return ids;
}

INSTANTIATE_TEST_SUITE_P(AllTasks, ExpertOnTask, ::testing::ValuesIn(TaskIds()),
                         [](const auto& info) { return info.param; });

TEST(Expert, OpensTheDrawerPastNinetyFivePercent) {
  ExpertPolicy expert;
  const RolloutRecord r = RunTask(Task("open_drawer"), expert, 0);
  ASSERT_FALSE(r.steps.empty());
  const double position = r.steps.back().drawers.at("drawer");
  const auto& drawer = *r.scene.FindArticulated("drawer");
  EXPECT_GE((position - drawer.range_min) / (drawer.range_max - drawer.range_min), 0.95);
}

TEST(Expert, RequiresPrivilegedState) {
  ExpertPolicy expert;
  EXPECT_THROW(expert.Reset({"t", "i", 0, std::nullopt}), std::invalid_argument);
}

TEST(Expert, PlansReachBeforeGraspForRigidTargets) {
  const auto& task = Task("put_cube_in_bowl");
  const world::Scene scene = world::LoadScene(task.scene_path);
  const arm::Pose start = arm::ForwardKinematics(HomeJoints(), Config().params);
  const auto plan = PlanWaypoints(task, scene, start);
  ASSERT_GE(plan.size(), 4u);
  const Eigen::Vector3d cube = scene.FindObject("red_cube")->pose.position;
  EXPECT_EQ(plan[1].pose.position, cube);
  EXPECT_EQ(plan[1].gripper, 1.0);
  EXPECT_EQ(plan[2].gripper, 0.0);
  EXPECT_EQ(plan.back().gripper, 1.0);
}

TEST(Expert, FailsGracefullyWhenTheTargetIsOutOfReach) {
  auto task = Task("pick_can");
  world::Scene scene = world::LoadScene(task.scene_path);
  scene.FindObject("yellow_can")->pose.position = {2.5, 0.0, 0.045};
  task.max_steps = 60;
  ExpertPolicy expert;
  const RolloutRecord r =
      RunEpisode(task, scene, test_util::DefaultSpec(task), expert, 0, Config());
  EXPECT_EQ(r.status, EpisodeStatus::kMaxSteps);
  EXPECT_TRUE(expert.failed());
  EXPECT_LT(r.progression.score, 1.0);
}

TEST(NoisyExpert, ZeroSigmaMatchesTheExpertExactly) {
  for (const auto& task : AllTasks()) {
    ExpertPolicy expert;
    NoisyExpertPolicy noisy(0.0);
    RolloutRecord a = RunTask(task, expert, 3);
    RolloutRecord b = RunTask(task, noisy, 3);
    EXPECT_EQ(b.policy_id, "scripted:noisy:0");
    b.policy_id = a.policy_id;
    EXPECT_EQ(a, b) << task.id;
  }
}

TEST(NoisyExpert, IdEncodesSigma) {
  EXPECT_EQ(NoisyExpertPolicy(0.05).Id(), "scripted:noisy:0.05");
  EXPECT_EQ(NoisyExpertPolicy(0.1).Id(), "scripted:noisy:0.1");
  EXPECT_THROW(NoisyExpertPolicy(-0.1), std::invalid_argument);
}

TEST(RandomPolicy, StaysWithinJointLimits) {
  RandomPolicy random(Config().params);
  random.Reset({"t", "i", 5, std::nullopt});
  for (int i = 0; i < 50; ++i) {
    const auto chunk = random.Act({});
    ASSERT_EQ(chunk.size(), 5u);
    EXPECT_TRUE(Config().params.limits.Contains(chunk.front().joint_targets));
    EXPECT_GE(chunk.front().gripper_target, 0.0);
    EXPECT_LT(chunk.front().gripper_target, 1.0);
  }
}

TEST(HoldPolicy, KeepsTheArmExactlyStationary) {
  auto task = Task("pick_can");
  task.max_steps = 40;
  HoldPolicy hold;
  const RolloutRecord r = RunTask(task, hold, 0);
  ASSERT_EQ(r.steps.size(), 40u);
  for (const auto& s : r.steps) {
    EXPECT_EQ(s.q, r.initial_arm.q);
    EXPECT_EQ(s.qdot, arm::JointVector::Zero());
    EXPECT_EQ(s.gripper, r.initial_arm.gripper_aperture);
  }
}

TEST(ZeroPolicy, ReturnsOneZeroAction) {
  ZeroPolicy zero;
  const auto chunk = zero.Act({});
  ASSERT_EQ(chunk.size(), 1u);
  EXPECT_EQ(chunk[0].ToVector(), arm::ActionVector::Zero());
}

TEST(ScriptedFactory, ParsesNames) {
  EXPECT_EQ(MakeScriptedPolicy("expert", Config().params)->Id(), "scripted:expert");
  EXPECT_EQ(MakeScriptedPolicy("noisy:0.02", Config().params)->Id(), "scripted:noisy:0.02");
  EXPECT_EQ(MakeScriptedPolicy("random", Config().params)->Id(), "scripted:random");
  EXPECT_THROW(MakeScriptedPolicy("noisy:abc", Config().params), std::invalid_argument);
  EXPECT_THROW(MakeScriptedPolicy("noisy:0.1x", Config().params), std::invalid_argument);
  EXPECT_THROW(MakeScriptedPolicy("oracle", Config().params), std::invalid_argument);
}

TEST(Episode, IsBitIdenticalAcrossRuns) {
  for (const char* id : {"put_mug_in_tray", "open_drawer"}) {
    NoisyExpertPolicy a(0.05), b(0.05);
    EXPECT_EQ(RunTask(Task(id), a, 11), RunTask(Task(id), b, 11)) << id;
  }
}

TEST(Episode, RecordRoundTripsThroughJson) {
  NoisyExpertPolicy policy(0.05);
  const RolloutRecord r = RunTask(Task("stack_block_on_box"), policy, 4);
  const RolloutRecord back = RolloutRecordFromJson(Json::parse(RolloutRecordToJson(r).dump()));
  EXPECT_EQ(back, r);
}

TEST(Episode, StageCreditsMatchProgressionTimes) {
  ExpertPolicy expert;
  const RolloutRecord r = RunTask(Task("put_cube_in_bowl"), expert, 0);
  std::vector<double> times;
  if (r.initial_stage) times.push_back(0.0);
  for (const auto& s : r.steps) {
    if (s.stage) times.push_back(s.time);
  }
  EXPECT_EQ(times, r.progression.stage_times);
  EXPECT_EQ(r.wall_sim_time, r.steps.back().time);
  EXPECT_EQ(r.progression.duration_to_success, r.steps.back().time);
}

TEST(Replay, ReproducesStoredStates) {
  for (const auto& task : AllTasks()) {
    NoisyExpertPolicy policy(0.05);
    const RolloutRecord r = RunTask(task, policy, 2);
    const ReplayReport rep =
        ReplayRecord(RolloutRecordFromJson(Json::parse(RolloutRecordToJson(r).dump())));
    EXPECT_TRUE(rep.ok) << task.id << ": " << rep.detail;
    EXPECT_EQ(rep.steps_checked, static_cast<int>(r.steps.size()));
  }
}

TEST(Replay, DetectsCorruption) {
  ExpertPolicy expert;
  const RolloutRecord r = RunTask(Task("pick_can"), expert, 0);
  ASSERT_GT(r.steps.size(), 20u);

  RolloutRecord q = r;
  q.steps[20].q(3) = std::nextafter(q.steps[20].q(3), 0.0);
  ReplayReport rep = ReplayRecord(q);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.first_mismatch, 20);
  EXPECT_NE(rep.detail.find("q"), std::string::npos);

  RolloutRecord a = r;
  a.steps[10].action.gripper_target = 0.5;
  rep = ReplayRecord(a);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.first_mismatch, 10);

  RolloutRecord p = r;
  p.progression.score = 0.5;
  EXPECT_FALSE(ReplayRecord(p).ok);
}

// Scripted failure modes for the episode loop.
class FaultyPolicy : public Policy {
 public:
  enum class Mode { kTimeout, kOversizedChunk, kThrow };
  FaultyPolicy(Mode mode, int after) : mode_(mode), after_(after) {}
  std::string Id() const override { return "faulty"; }
  Capabilities capabilities() const override { return {false, true}; }
  void Reset(const EpisodeStart& s) override {
    expert_.Reset(s);
    calls_ = 0;
  }
  std::vector<arm::ActionCommand> Act(const Observation& obs) override {
    if (calls_++ < after_) return expert_.Act(obs);
    if (mode_ == Mode::kTimeout) throw PolicyTimeout("no reply");
    if (mode_ == Mode::kThrow) throw std::runtime_error("policy crashed");
    return std::vector<arm::ActionCommand>(17, expert_.Act(obs).front());
  }

 private:
  Mode mode_;
  int after_;
  int calls_ = 0;
  ExpertPolicy expert_;
};

TEST(Episode, TimeoutScoresThePartialTrace) {
  FaultyPolicy policy(FaultyPolicy::Mode::kTimeout, 60);
  const RolloutRecord r = RunTask(Task("pick_can"), policy, 0);
  EXPECT_EQ(r.status, EpisodeStatus::kPolicyTimeout);
  EXPECT_EQ(r.steps.size(), 60u);
  EXPECT_GT(r.progression.score, 0.0);
  EXPECT_LT(r.progression.score, 1.0);
  EXPECT_TRUE(ReplayRecord(r).ok);
}

TEST(Episode, ProtocolViolationAbortsTheEpisode) {
  FaultyPolicy policy(FaultyPolicy::Mode::kOversizedChunk, 5);
  const RolloutRecord r = RunTask(Task("pick_can"), policy, 0);
  EXPECT_EQ(r.status, EpisodeStatus::kProtocolError);
  EXPECT_EQ(r.steps.size(), 5u);
  EXPECT_FALSE(IsScored(r.status));
}

TEST(Episode, PolicyExceptionsAreRecorded) {
  FaultyPolicy policy(FaultyPolicy::Mode::kThrow, 0);
  const RolloutRecord r = RunTask(Task("pick_can"), policy, 0);
  EXPECT_EQ(r.status, EpisodeStatus::kPolicyError);
  EXPECT_EQ(r.message, "policy crashed");
}

TEST(Episode, InapplicableSpecRunsNothing) {
  ExpertPolicy expert;
  perturb::PerturbationSpec spec = test_util::DefaultSpec(Task("push_button"));
  spec.applicable = false;
  spec.not_applicable_reason = "no rigid target";
  const RolloutRecord r = RunTask(Task("push_button"), expert, 0, &spec);
  EXPECT_EQ(r.status, EpisodeStatus::kNotApplicable);
  EXPECT_TRUE(r.steps.empty());
  EXPECT_EQ(r.message, "no rigid target");
}

TEST(Episode, ChunksExecuteFullyBeforeTheNextObservation) {
  class Counting : public Policy {
   public:
    std::string Id() const override { return "counting"; }
    Capabilities capabilities() const override { return {false, false}; }
    void Reset(const EpisodeStart&) override {}
    std::vector<arm::ActionCommand> Act(const Observation& obs) override {
      steps.push_back(obs.step);
      return std::vector<arm::ActionCommand>(7, {obs.joint_pos, 1.0});
    }
    std::vector<int> steps;
  } policy;
  auto task = Task("pick_can");
  task.max_steps = 30;
  const RolloutRecord r = RunTask(task, policy, 0);
  EXPECT_EQ(r.steps.size(), 30u);
  EXPECT_EQ(policy.steps, (std::vector<int>{0, 7, 14, 21, 28}));
}

TEST(Observation, ImagesComeFromEverySceneCamera) {
  const auto& task = Task("put_cube_in_bowl");
  const world::Scene scene = world::LoadScene(task.scene_path);
  const world::WorldState w = world::MakeWorld(scene, Config().home, Config().params);
  const Observation obs = MakeObservation(w, Config().params, test_util::DefaultSpec(task), true);
  ASSERT_EQ(obs.images.size(), scene.cameras.size());
  for (size_t i = 0; i < obs.images.size(); ++i) {
    EXPECT_EQ(obs.images[i].name, scene.cameras[i].name);
    EXPECT_EQ(obs.images[i].image.width, scene.cameras[i].intrinsics.width);
  }
  EXPECT_TRUE(MakeObservation(w, Config().params, test_util::DefaultSpec(task), false).images.empty());
}

TEST(Observation, AugmentationOnlyChangesImages) {
  const auto& task = Task("put_cube_in_bowl");
  const world::Scene scene = world::LoadScene(task.scene_path);
  const world::WorldState w = world::MakeWorld(scene, Config().home, Config().params);
  perturb::PerturbationSpec aug = test_util::DefaultSpec(task);
  aug.factor = perturb::Factor::kVAug;
  aug.contrast = 1.4;
  const Observation a = MakeObservation(w, Config().params, test_util::DefaultSpec(task), true);
  const Observation b = MakeObservation(w, Config().params, aug, true);
  EXPECT_EQ(a.joint_pos, b.joint_pos);
  EXPECT_NE(a.images[0].image, b.images[0].image);
}

TEST(SemanticFactors, FixedActionTracesMatchDefault) {
  for (const auto& task : AllTasks()) {
    const world::Scene scene = world::LoadScene(task.scene_path);
    ExpertPolicy expert;
    const RolloutRecord base = RunTask(task, expert, 0);
    for (const perturb::Factor f : perturb::AllFactors()) {
      if (!perturb::IsPurelySemantic(f)) continue;
      const auto spec = perturb::Sample(f, task, scene, 9, Config().perturb);
      test_util::FixedSequencePolicy fixed(test_util::Actions(base));
      const RolloutRecord r = RunEpisode(task, scene, spec, fixed, 0, Config());
      SCOPED_TRACE(task.id + " " + std::string(perturb::FactorName(f)));
      EXPECT_NE(r.instruction, base.instruction);
      EXPECT_EQ(r.steps, base.steps);
      EXPECT_EQ(r.progression, base.progression);
    }
  }
}

TEST(Status, NamesRoundTrip) {
  for (auto s : {EpisodeStatus::kSuccess, EpisodeStatus::kMaxSteps, EpisodeStatus::kPolicyTimeout,
                 EpisodeStatus::kProtocolError, EpisodeStatus::kPolicyError,
                 EpisodeStatus::kConnectionLost, EpisodeStatus::kNotApplicable,
                 EpisodeStatus::kSetupError}) {
    EXPECT_EQ(ParseStatus(StatusName(s)), s);
  }
  EXPECT_THROW(ParseStatus("done"), std::invalid_argument);
}

}  // namespace
}  // namespace realm::harness
