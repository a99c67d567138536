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

#include "realm/harness/episode.h"

#include <array>
#include <fstream>
#include <stdexcept>

#include "realm/arm/params_io.h"
#include "realm/harness/scripted.h"
#include "realm/render/rasterizer.h"
#include "realm/world/scene_io.h"

namespace realm::harness {

using arm::ActionCommand;
using world::WorldState;

namespace {

constexpr std::array<std::pair<EpisodeStatus, std::string_view>, 8> kStatusNames = {{
    {EpisodeStatus::kSuccess, "success"},
    {EpisodeStatus::kMaxSteps, "max_steps"},
    {EpisodeStatus::kPolicyTimeout, "timeout"},
    {EpisodeStatus::kProtocolError, "protocol_error"},
    {EpisodeStatus::kPolicyError, "policy_error"},
    {EpisodeStatus::kConnectionLost, "connection_lost"},
    {EpisodeStatus::kNotApplicable, "not_applicable"},
    {EpisodeStatus::kSetupError, "setup_error"},
}};

Json OptionalIntToJson(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<int> OptionalIntFromJson(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<int>();
}

}  // namespace

EpisodeConfig LoadEpisodeConfig(const std::filesystem::path& data_dir) {
  EpisodeConfig c;
  c.params = arm::LoadArmParams(data_dir / "arm" / "droid_panda.json");
  c.thresholds = progression::LoadThresholds(data_dir / "config" / "progression.json");
  c.perturb = perturb::LoadPerturbConfig(data_dir / "config" / "perturbation.json");
  c.variants = perturb::LoadInstructionVariants(data_dir / "config" / "instruction_variants.json");
  c.home = HomeState();
  return c;
}

std::string_view StatusName(EpisodeStatus status) {
  for (const auto& [s, name] : kStatusNames) {
    if (s == status) return name;
  }
  throw std::invalid_argument("unknown episode status");
}

EpisodeStatus ParseStatus(std::string_view name) {
  for (const auto& [s, n] : kStatusNames) {
    if (n == name) return s;
  }
  throw std::invalid_argument("unknown episode status '" + std::string(name) + "'");
}

bool IsScored(EpisodeStatus status) {
  return status == EpisodeStatus::kSuccess || status == EpisodeStatus::kMaxSteps ||
         status == EpisodeStatus::kPolicyTimeout;
}

StepRecord CaptureStep(const WorldState& state, const ActionCommand& action,
                       std::optional<int> stage) {
  StepRecord r;
  r.action = action;
  r.q = state.arm.q;
  r.qdot = state.arm.qdot;
  r.gripper = state.arm.gripper_aperture;
  r.time = state.arm.time;
  for (const auto& o : state.scene.objects) {
    if (o.role != world::ObjectRole::kFixture) r.objects[o.id] = o.pose;
  }
  for (const auto& a : state.scene.articulated) r.drawers[a.base.id] = a.position;
  for (const auto& t : state.scene.toggles) r.toggles[t.base.id] = t.toggled;
  if (state.attachment) r.held = state.attachment->object_id;
  r.stage = stage;
  return r;
}

Json StepRecordToJson(const StepRecord& s) {
  Json objects = Json::object();
  for (const auto& [id, pose] : s.objects) objects[id] = arm::PoseToJson(pose);
  Json drawers = Json::object();
  for (const auto& [id, p] : s.drawers) drawers[id] = p;
  Json toggles = Json::object();
  for (const auto& [id, t] : s.toggles) toggles[id] = t;
  return {{"action", VectorToJson(s.action.ToVector())},
          {"q", VectorToJson(s.q)},
          {"qdot", VectorToJson(s.qdot)},
          {"gripper", s.gripper},
          {"time", s.time},
          {"objects", objects},
          {"drawers", drawers},
          {"toggles", toggles},
          {"held", s.held},
          {"stage", OptionalIntToJson(s.stage)}};
}

StepRecord StepRecordFromJson(const Json& j) {
  StepRecord s;
  s.action = ActionCommand::FromVector(VectorFromJson<arm::kActionSize>(j.at("action"), "action"));
  s.q = VectorFromJson<arm::kNumJoints>(j.at("q"), "q");
  s.qdot = VectorFromJson<arm::kNumJoints>(j.at("qdot"), "qdot");
  s.gripper = j.at("gripper").get<double>();
  s.time = j.at("time").get<double>();
  for (const auto& [id, pose] : j.at("objects").items()) s.objects[id] = arm::PoseFromJson(pose);
  for (const auto& [id, p] : j.at("drawers").items()) s.drawers[id] = p.get<double>();
  for (const auto& [id, t] : j.at("toggles").items()) s.toggles[id] = t.get<bool>();
  s.held = j.at("held").get<std::string>();
  s.stage = OptionalIntFromJson(j.at("stage"));
  return s;
}

Json RolloutRecordToJson(const RolloutRecord& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) steps.push_back(StepRecordToJson(s));
  return {{"task_id", r.task_id},
          {"policy_id", r.policy_id},
          {"perturbation", perturb::PerturbationSpecToJson(r.spec)},
          {"seed", r.seed},
          {"status", StatusName(r.status)},
          {"message", r.message},
          {"instruction", r.instruction},
          {"task", world::TaskSpecToJson(r.task)},
          {"scene", world::SceneToJson(r.scene)},
          {"initial_arm", arm::ArmStateToJson(r.initial_arm)},
          {"arm_params", arm::ArmParamsToJson(r.params)},
          {"world_config", world::WorldConfigToJson(r.world_config)},
          {"thresholds", progression::ThresholdsToJson(r.thresholds)},
          {"initial_stage", OptionalIntToJson(r.initial_stage)},
          {"steps", steps},
          {"progression", progression::ProgressionResultToJson(r.progression)},
          {"wall_sim_time", r.wall_sim_time}};
}

RolloutRecord RolloutRecordFromJson(const Json& j) {
  RolloutRecord r;
  r.task_id = j.at("task_id").get<std::string>();
  r.policy_id = j.at("policy_id").get<std::string>();
  r.spec = perturb::PerturbationSpecFromJson(j.at("perturbation"));
  r.seed = j.at("seed").get<uint64_t>();
  r.status = ParseStatus(j.at("status").get<std::string>());
  r.message = j.at("message").get<std::string>();
  r.instruction = j.at("instruction").get<std::string>();
  r.task = world::TaskSpecFromJson(j.at("task"));
  r.scene = world::SceneFromJson(j.at("scene"));
  r.initial_arm = arm::ArmStateFromJson(j.at("initial_arm"));
  r.params = arm::ArmParamsFromJson(j.at("arm_params"));
  r.world_config = world::WorldConfigFromJson(j.at("world_config"));
  r.thresholds = progression::ThresholdsFromJson(j.at("thresholds"));
  r.initial_stage = OptionalIntFromJson(j.at("initial_stage"));
  for (const auto& s : j.at("steps")) r.steps.push_back(StepRecordFromJson(s));
  r.progression = progression::ProgressionResultFromJson(j.at("progression"));
  r.wall_sim_time = j.at("wall_sim_time").get<double>();
  return r;
}

void SaveRolloutRecord(const RolloutRecord& r, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << RolloutRecordToJson(r).dump() << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

RolloutRecord LoadRolloutRecord(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return RolloutRecordFromJson(Json::parse(in));
  } catch (const Json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

Observation MakeObservation(const WorldState& state, const arm::ArmParams& params,
                            const perturb::PerturbationSpec& spec, bool with_images) {
  Observation obs;
  obs.step = state.step_index;
  obs.joint_pos = state.arm.q;
  obs.joint_vel = state.arm.qdot;
  obs.gripper = state.arm.gripper_aperture;
  if (with_images) {
    const render::ArmView view{&params, state.arm.q, state.arm.gripper_aperture};
    for (const auto& camera : state.scene.cameras) {
      obs.images.push_back(
          {camera.name,
           perturb::ApplyToObservation(spec, render::Render(state.scene, camera.name, view))});
    }
  }
  return obs;
}

RolloutRecord RunEpisode(const world::TaskSpec& task, const world::Scene& base_scene,
                         const perturb::PerturbationSpec& spec, Policy& policy, uint64_t seed,
                         const EpisodeConfig& config) {
  RolloutRecord rec;
  rec.task_id = task.id;
  rec.policy_id = policy.Id();
  rec.spec = spec;
  rec.seed = seed;
  rec.task = task;
  rec.scene = base_scene;
  rec.initial_arm = config.home;
  rec.params = config.params;
  rec.world_config = config.world;
  rec.thresholds = config.thresholds;
  rec.progression.stage_count =
      static_cast<int>(progression::RubricFor(task.skill).stages.size());

  if (!spec.applicable) {
    rec.status = EpisodeStatus::kNotApplicable;
    rec.message = spec.not_applicable_reason;
    return rec;
  }
  try {
    std::tie(rec.scene, rec.task) = perturb::ApplyToScene(spec, base_scene, task, config.perturb);
    rec.instruction = perturb::ApplyToInstruction(spec, rec.task, config.variants);
  } catch (const std::exception& e) {
    rec.status = EpisodeStatus::kSetupError;
    rec.message = e.what();
    return rec;
  }

  WorldState state = world::MakeWorld(rec.scene, rec.initial_arm, rec.params);
  progression::ProgressionTracker tracker(rec.task, state, rec.thresholds);
  rec.initial_stage = tracker.Update(state);
  const Capabilities caps = policy.capabilities();

  auto finish = [&](EpisodeStatus status, std::string message) {
    rec.status = status;
    rec.message = std::move(message);
    rec.progression = tracker.result();
    rec.wall_sim_time = state.arm.time;
    return rec;
  };

  try {
    EpisodeStart start{rec.task.id, rec.instruction, seed, std::nullopt};
    if (caps.wants_privileged) start.privileged = PrivilegedInfo{rec.task, rec.scene, rec.params};
    policy.Reset(start);

    const int max_steps = rec.task.max_steps;
    while (static_cast<int>(rec.steps.size()) < max_steps && !tracker.result().success) {
      const std::vector<ActionCommand> chunk =
          policy.Act(MakeObservation(state, rec.params, spec, caps.wants_images));
      ValidateChunk(chunk);
      for (const ActionCommand& action : chunk) {
        if (static_cast<int>(rec.steps.size()) >= max_steps || tracker.result().success) break;
        state = world::WorldStep(state, rec.params, action, rec.world_config);
        const std::optional<int> stage = tracker.Update(state);
        rec.steps.push_back(CaptureStep(state, action, stage));
      }
    }
    policy.End(tracker.result().score);
  } catch (const PolicyTimeout& e) {
    return finish(EpisodeStatus::kPolicyTimeout, e.what());
  } catch (const ProtocolError& e) {
    return finish(EpisodeStatus::kProtocolError, e.what());
  } catch (const ConnectionLost& e) {
    return finish(EpisodeStatus::kConnectionLost, e.what());
  } catch (const std::exception& e) {
    return finish(EpisodeStatus::kPolicyError, e.what());
  }
  return finish(tracker.result().success ? EpisodeStatus::kSuccess : EpisodeStatus::kMaxSteps, "");
}

ReplayReport ReplayRecord(const RolloutRecord& record) {
  ReplayReport report;
  auto mismatch = [&](int step, std::string detail) {
    report.ok = false;
    report.first_mismatch = step;
    report.detail = std::move(detail);
    return report;
  };
  if (record.steps.empty()) return report;

  WorldState state = world::MakeWorld(record.scene, record.initial_arm, record.params);
  progression::ProgressionTracker tracker(record.task, state, record.thresholds);
  if (tracker.Update(state) != record.initial_stage) {
    return mismatch(-1, "initial stage credit differs");
  }
  for (size_t i = 0; i < record.steps.size(); ++i) {
    const StepRecord& stored = record.steps[i];
    state = world::WorldStep(state, record.params, stored.action, record.world_config);
    const std::optional<int> stage = tracker.Update(state);
    const StepRecord replayed = CaptureStep(state, stored.action, stage);
    if (!(replayed == stored)) {
      const Json a = StepRecordToJson(stored);
      const Json b = StepRecordToJson(replayed);
      std::string fields;
      for (const auto& [key, value] : a.items()) {
        if (b.at(key) != value) fields += (fields.empty() ? "" : ", ") + key;
      }
      return mismatch(static_cast<int>(i), "step " + std::to_string(i) + " differs in: " + fields);
    }
    report.steps_checked = static_cast<int>(i) + 1;
  }
  if (!(tracker.result() == record.progression)) {
    return mismatch(static_cast<int>(record.steps.size()) - 1, "progression result differs");
  }
  return report;
}

}  // namespace realm::harness
