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

#ifndef REALM_PROGRESSION_PROGRESSION_H_
#define REALM_PROGRESSION_PROGRESSION_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "realm/common/json_eigen.h"
#include "realm/world/task.h"
#include "realm/world/world.h"

namespace realm::progression {

struct Thresholds {
  double reach = 0.05;              // m, tool point to target point
  double lift = 0.05;               // m above the initial height
  double move_close = 0.10;         // m, horizontal, to destination center
  double stack_tolerance = 0.01;    // m, resting height error
  double touch = 0.02;              // m, tool point to surface
  double touch_move = 0.02;         // m of handle displacement
  double rotate_degrees = 45.0;
  std::vector<double> open_fractions = {0.50, 0.75, 0.95};
  std::vector<double> close_fractions = {0.50, 0.25, 0.05};

  bool operator==(const Thresholds&) const = default;
};

Json ThresholdsToJson(const Thresholds& t);
Thresholds ThresholdsFromJson(const Json& j);
Thresholds LoadThresholds(const std::filesystem::path& path);

struct SkillRubric {
  world::Skill skill;
  std::vector<std::string> stages;
};

SkillRubric RubricFor(world::Skill skill);

struct ProgressionResult {
  int stages_achieved = 0;
  int stage_count = 1;
  double score = 0.0;
  std::vector<double> stage_times;  // s, strictly increasing
  bool success = false;
  std::optional<double> duration_to_success;

  bool operator==(const ProgressionResult&) const = default;
};

Json ProgressionResultToJson(const ProgressionResult& r);
ProgressionResult ProgressionResultFromJson(const Json& j);

// Distance from `point` to the object's bounding box (0 inside).
double SurfaceDistance(const world::RigidObject& object, const Eigen::Vector3d& point);

// Incremental scorer. The first state fixes the reference quantities
// (initial height and yaw of the target, initial drawer position). Each
// Update credits at most one stage, so stage k + 1 is only credited at a
// later step than stage k.
class ProgressionTracker {
 public:
  ProgressionTracker(const world::TaskSpec& task, const world::WorldState& initial,
                     const Thresholds& thresholds = {});

  // Returns the index of the stage credited on this state, if any.
  std::optional<int> Update(const world::WorldState& state);

  const ProgressionResult& result() const { return result_; }
  const SkillRubric& rubric() const { return rubric_; }

 private:
  bool StageHolds(int stage, const world::WorldState& state) const;

  world::TaskSpec task_;
  Thresholds thresholds_;
  SkillRubric rubric_;
  double initial_z_ = 0.0;
  double initial_yaw_ = 0.0;
  double initial_position_ = 0.0;
  ProgressionResult result_;
};

// Scores a trace whose first element is the episode's initial state. Throws
// std::invalid_argument on an empty trace or a rubric for a different skill.
ProgressionResult ScoreTrace(std::span<const world::WorldState> trace,
                             const world::TaskSpec& task, const SkillRubric& rubric,
                             const Thresholds& thresholds = {});

}  // namespace realm::progression

#endif  // REALM_PROGRESSION_PROGRESSION_H_
