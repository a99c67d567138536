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

#ifndef REALM_WORLD_TASK_H_
#define REALM_WORLD_TASK_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "realm/common/json_eigen.h"

namespace realm::world {

enum class Skill { kPut, kPick, kStack, kPush, kRotate, kOpen, kClose };
enum class TaskSet { kBase, kArticulated };

std::string_view SkillName(Skill skill);
Skill ParseSkill(std::string_view name);
std::string_view TaskSetName(TaskSet set);
TaskSet ParseTaskSet(std::string_view name);

// Skills that act on an articulated object rather than a rigid one.
bool IsArticulatedSkill(Skill skill);
// Skills whose rubric needs a destination object.
bool NeedsDestination(Skill skill);

struct TaskSpec {
  std::string id;
  Skill skill = Skill::kPick;
  std::filesystem::path scene_path;  // absolute after loading
  std::string target;
  std::optional<std::string> destination;
  std::string instruction;
  std::optional<Skill> alternate_skill;
  // Object the alternate skill acts on; defaults to target.
  std::optional<std::string> alternate_target;
  int max_steps = 450;
  TaskSet set = TaskSet::kBase;

  void Validate() const;
  bool operator==(const TaskSpec&) const = default;
};

Json TaskSpecToJson(const TaskSpec& task);
// Relative scene paths resolve against `base_dir`.
TaskSpec TaskSpecFromJson(const Json& j, const std::filesystem::path& base_dir = {});
TaskSpec LoadTaskSpec(const std::filesystem::path& path);

// Reads a task-set index ({"base": [...], "articulated": [...]}) and returns
// the tasks of `selection` ("base", "articulated" or "all") in file order.
std::vector<TaskSpec> LoadTaskSet(const std::filesystem::path& index,
                                  std::string_view selection);

}  // namespace realm::world

#endif  // REALM_WORLD_TASK_H_
