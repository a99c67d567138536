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

#ifndef REALM_PERTURB_PERTURB_H_
#define REALM_PERTURB_PERTURB_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include "realm/common/json_eigen.h"
#include "realm/render/image.h"
#include "realm/world/scene.h"
#include "realm/world/task.h"

namespace realm::perturb {

enum class Factor {
  kDefault,
  kVAug,
  kVSc,
  kVView,
  kVLight,
  kSProp,
  kSLang,
  kSMo,
  kSAff,
  kSInt,
  kBHobj,
  kVbPose,
  kVbMobj,
  kSbNoun,
  kSbVrb,
  kVsbNobj,
};

inline constexpr int kNumFactors = 16;

enum Category : unsigned { kVisual = 1u, kSemantic = 2u, kBehavioral = 4u };

// All factors in declaration order, DEFAULT first.
const std::array<Factor, kNumFactors>& AllFactors();
// Identifier such as "VB-POSE". Parsing also accepts underscores.
std::string_view FactorName(Factor factor);
Factor ParseFactor(std::string_view name);
unsigned FactorCategories(Factor factor);
// The five factors that only rephrase the instruction.
bool IsPurelySemantic(Factor factor);

// Raised when a perturbation cannot be sampled or applied as specified.
class PerturbationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};

struct PerturbConfig {
  double camera_translation = 0.10;  // m, max norm
  double camera_rotation_degrees = 10.0;
  Range light_intensity = {0.3, 2.0};  // multiplier
  std::vector<Eigen::Vector3d> light_palette = {
      {1.0, 1.0, 1.0}, {1.0, 0.85, 0.65}, {0.75, 0.85, 1.0},
      {1.0, 0.7, 0.7}, {0.75, 1.0, 0.75}, {0.95, 0.8, 1.0}};
  Range mass_scale = {0.25, 4.0};  // sampled log-uniformly
  Range size_scale = {0.7, 1.3};
  int min_distractors = 1;
  int max_distractors = 3;
  Range contrast = {0.6, 1.5};
  Range blur_sigma = {0.0, 1.5};  // px
  // Workspace region for VB-POSE and V-SC placement (world xy, m).
  Range region_x = {0.38, 0.62};
  Range region_y = {-0.27, 0.27};
  double placement_clearance = 0.015;  // m between footprints
  int pose_max_tries = 20;
  int unseen_pool_size = 24;

  bool operator==(const PerturbConfig&) const = default;
};

Json PerturbConfigToJson(const PerturbConfig& c);
PerturbConfig PerturbConfigFromJson(const Json& j);
PerturbConfig LoadPerturbConfig(const std::filesystem::path& path);

struct LightChange {
  double intensity_scale = 1.0;
  Eigen::Vector3d color = Eigen::Vector3d::Ones();
  bool operator==(const LightChange&) const = default;
};

// Fully determines one perturbed episode setup.
struct PerturbationSpec {
  Factor factor = Factor::kDefault;
  uint64_t seed = 0;
  std::string task_id;
  bool applicable = true;
  std::string not_applicable_reason;

  // V-AUG
  double contrast = 1.0;
  double blur_sigma = 0.0;
  // V-SC
  std::vector<world::RigidObject> distractors;
  // V-VIEW: external camera delta, translation in world frame, rotation in
  // the camera frame.
  Eigen::Vector3d camera_translation = Eigen::Vector3d::Zero();
  Eigen::Quaterniond camera_rotation = Eigen::Quaterniond::Identity();
  // V-LIGHT, one entry per scene light.
  std::vector<LightChange> lights;
  // Semantic factors: index into the variant table row.
  int variant_index = 0;
  // B-HOBJ
  double mass_scale = 1.0;
  // VB-POSE
  Eigen::Vector2d position_xy = Eigen::Vector2d::Zero();
  double yaw = 0.0;
  // VB-MOBJ
  Eigen::Vector3d size_scale = Eigen::Vector3d::Ones();
  world::Shape shape = world::Shape::kBox;
  // SB-NOUN
  std::string new_target;
  std::string new_target_noun;
  // SB-VRB
  world::Skill new_skill = world::Skill::kPick;
  // VSB-NOBJ
  std::optional<world::RigidObject> unseen_object;

  bool operator==(const PerturbationSpec&) const = default;
};

Json PerturbationSpecToJson(const PerturbationSpec& spec);
PerturbationSpec PerturbationSpecFromJson(const Json& j);

// Procedural primitives that never appear in shipped scenes (seed 0).
std::vector<world::RigidObject> UnseenObjectPool(int size);

// Draws the factor parameters from a generator keyed by (factor, task id,
// seed). Inapplicable combinations return applicable = false with a reason.
// Throws PerturbationError when VB-POSE finds no free placement.
PerturbationSpec Sample(Factor factor, const world::TaskSpec& task, const world::Scene& scene,
                        uint64_t seed, const PerturbConfig& config = {});

// Returns the perturbed scene and task. Identity for DEFAULT, the semantic
// factors, V-AUG and inapplicable specs. Throws PerturbationError when the
// spec does not fit the scene.
std::pair<world::Scene, world::TaskSpec> ApplyToScene(const PerturbationSpec& spec,
                                                      const world::Scene& scene,
                                                      const world::TaskSpec& task,
                                                      const PerturbConfig& config = {});

// Per task id and semantic factor, a list of alternative instructions.
class InstructionVariantTable {
 public:
  InstructionVariantTable() = default;
  explicit InstructionVariantTable(std::map<std::string, std::map<Factor, std::vector<std::string>>> rows);

  const std::vector<std::string>& Variants(const std::string& task_id, Factor factor) const;
  // Throws std::invalid_argument unless every purely semantic factor has a
  // non-empty list for the task and no list contains the default instruction.
  void ValidateFor(const world::TaskSpec& task) const;

 private:
  std::map<std::string, std::map<Factor, std::vector<std::string>>> rows_;
};

InstructionVariantTable InstructionVariantTableFromJson(const Json& j);
InstructionVariantTable LoadInstructionVariants(const std::filesystem::path& path);

// Default phrasing for a skill applied to nouns, e.g. "put the {t} in the {d}".
std::string TemplateInstruction(world::Skill skill, const std::string& target_noun,
                                const std::string& destination_noun = "");

// The instruction given to the policy. `task` is the task returned by
// ApplyToScene, whose instruction already names a retargeted object or skill.
// Purely semantic factors pick row entry spec.variant_index.
std::string ApplyToInstruction(const PerturbationSpec& spec, const world::TaskSpec& task,
                               const InstructionVariantTable& table);

// V-AUG applies contrast and blur; every other factor is the identity.
render::Image ApplyToObservation(const PerturbationSpec& spec, const render::Image& image);

}  // namespace realm::perturb

#endif  // REALM_PERTURB_PERTURB_H_
