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

#include "realm/world/task.h"

#include <array>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace realm::world {
namespace {

constexpr std::array<std::pair<Skill, std::string_view>, 7> kSkills = {{
    {Skill::kPut, "put"},
    {Skill::kPick, "pick"},
    {Skill::kStack, "stack"},
    {Skill::kPush, "push"},
    {Skill::kRotate, "rotate"},
    {Skill::kOpen, "open"},
    {Skill::kClose, "close"},
}};

Json ReadJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string_view SkillName(Skill skill) {
  for (const auto& [s, name] : kSkills) {
    if (s == skill) return name;
  }
  throw std::invalid_argument("unknown skill value");
}

Skill ParseSkill(std::string_view name) {
  for (const auto& [s, n] : kSkills) {
    if (n == name) return s;
  }
  throw std::invalid_argument("unknown skill '" + std::string(name) + "'");
}

std::string_view TaskSetName(TaskSet set) {
  return set == TaskSet::kBase ? "base" : "articulated";
}

TaskSet ParseTaskSet(std::string_view name) {
  if (name == "base") return TaskSet::kBase;
  if (name == "articulated") return TaskSet::kArticulated;
  throw std::invalid_argument("unknown task set '" + std::string(name) + "'");
}

bool IsArticulatedSkill(Skill skill) { return skill == Skill::kOpen || skill == Skill::kClose; }

bool NeedsDestination(Skill skill) { return skill == Skill::kPut || skill == Skill::kStack; }

void TaskSpec::Validate() const {
  if (id.empty()) throw std::invalid_argument("task id is empty");
  if (target.empty()) throw std::invalid_argument("task " + id + ": target is empty");
  if (NeedsDestination(skill) && !destination) {
    throw std::invalid_argument("task " + id + ": skill " + std::string(SkillName(skill)) +
                                " needs a destination");
  }
  if (max_steps <= 0) throw std::invalid_argument("task " + id + ": max_steps must be > 0");
}

Json TaskSpecToJson(const TaskSpec& t) {
  Json j = {{"id", t.id},
            {"skill", SkillName(t.skill)},
            {"scene", t.scene_path.string()},
            {"target", t.target},
            {"instruction", t.instruction},
            {"max_steps", t.max_steps},
            {"set", TaskSetName(t.set)}};
  if (t.destination) j["destination"] = *t.destination;
  if (t.alternate_skill) j["alternate_skill"] = SkillName(*t.alternate_skill);
  if (t.alternate_target) j["alternate_target"] = *t.alternate_target;
  return j;
}

TaskSpec TaskSpecFromJson(const Json& j, const std::filesystem::path& base_dir) {
  TaskSpec t;
  t.id = j.at("id").get<std::string>();
  t.skill = ParseSkill(j.at("skill").get<std::string>());
  std::filesystem::path scene = j.at("scene").get<std::string>();
  t.scene_path = scene.is_absolute() || base_dir.empty()
                     ? scene
                     : std::filesystem::weakly_canonical(base_dir / scene);
  t.target = j.at("target").get<std::string>();
  if (j.contains("destination")) t.destination = j["destination"].get<std::string>();
  t.instruction = j.at("instruction").get<std::string>();
  if (j.contains("alternate_skill")) {
    t.alternate_skill = ParseSkill(j["alternate_skill"].get<std::string>());
  }
  if (j.contains("alternate_target")) t.alternate_target = j["alternate_target"].get<std::string>();
  t.max_steps = j.value("max_steps", t.max_steps);
  t.set = ParseTaskSet(j.value("set", std::string("base")));
  t.Validate();
  return t;
}

TaskSpec LoadTaskSpec(const std::filesystem::path& path) {
  try {
    return TaskSpecFromJson(ReadJson(path), path.parent_path());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::vector<TaskSpec> LoadTaskSet(const std::filesystem::path& index,
                                  std::string_view selection) {
  const Json j = ReadJson(index);
  std::vector<std::string> groups;
  if (selection == "all") {
    groups = {"base", "articulated"};
  } else {
    ParseTaskSet(selection);
    groups = {std::string(selection)};
  }
  std::vector<TaskSpec> tasks;
  for (const auto& g : groups) {
    if (!j.contains(g)) continue;
    for (const auto& p : j[g]) {
      tasks.push_back(LoadTaskSpec(index.parent_path() / p.get<std::string>()));
    }
  }
  return tasks;
}

}  // namespace realm::world
