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

#include "realm/perturb/perturb.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "realm/common/rng.h"
#include "realm/render/photometric.h"
#include "realm/world/scene_io.h"

namespace realm::perturb {

using Eigen::Vector2d;
using Eigen::Vector3d;
using world::RigidObject;
using world::Scene;
using world::Skill;
using world::TaskSpec;

namespace {

struct FactorInfo {
  Factor factor;
  std::string_view name;
  unsigned categories;
};

constexpr std::array<FactorInfo, kNumFactors> kFactors = {{
    {Factor::kDefault, "DEFAULT", 0u},
    {Factor::kVAug, "V-AUG", kVisual},
    {Factor::kVSc, "V-SC", kVisual},
    {Factor::kVView, "V-VIEW", kVisual},
    {Factor::kVLight, "V-LIGHT", kVisual},
    {Factor::kSProp, "S-PROP", kSemantic},
    {Factor::kSLang, "S-LANG", kSemantic},
    {Factor::kSMo, "S-MO", kSemantic},
    {Factor::kSAff, "S-AFF", kSemantic},
    {Factor::kSInt, "S-INT", kSemantic},
    {Factor::kBHobj, "B-HOBJ", kBehavioral},
    {Factor::kVbPose, "VB-POSE", kVisual | kBehavioral},
    {Factor::kVbMobj, "VB-MOBJ", kVisual | kBehavioral},
    {Factor::kSbNoun, "SB-NOUN", kSemantic | kBehavioral},
    {Factor::kSbVrb, "SB-VRB", kSemantic | kBehavioral},
    {Factor::kVsbNobj, "VSB-NOBJ", kVisual | kSemantic | kBehavioral},
}};

const FactorInfo& Info(Factor f) { return kFactors[static_cast<size_t>(f)]; }

bool IsRigidSkill(Skill s) { return !world::IsArticulatedSkill(s) && s != Skill::kPush; }

// Oriented footprint rectangle of an obstacle.
struct Footprint {
  Vector2d center;
  Vector2d half;
  double yaw;
};

double FootprintRadius(const RigidObject& o) { return 0.5 * o.size.head<2>().norm(); }

Footprint FootprintOf(const RigidObject& o) {
  return {o.pose.position.head<2>(), 0.5 * o.size.head<2>(), o.pose.Yaw()};
}

// Footprints of everything on the table except fixtures and `exclude`.
std::vector<Footprint> Obstacles(const Scene& scene, std::string_view exclude) {
  std::vector<Footprint> out;
  auto add = [&](const RigidObject& o) {
    if (o.id != exclude) out.push_back(FootprintOf(o));
  };
  for (const auto& o : scene.objects) {
    if (o.role != world::ObjectRole::kFixture) add(o);
  }
  for (const auto& a : scene.articulated) {
    RigidObject body = a.base;
    body.pose = a.BodyPose();
    add(body);
    if (a.housing) add(*a.housing);
  }
  for (const auto& t : scene.toggles) add(t.base);
  return out;
}

// True when a disk of `radius` at `xy` keeps `clearance` from every footprint.
bool Free(const Vector2d& xy, double radius, const std::vector<Footprint>& obstacles,
          double clearance) {
  return std::all_of(obstacles.begin(), obstacles.end(), [&](const Footprint& f) {
    const Vector2d d = xy - f.center;
    const double c = std::cos(f.yaw), s = std::sin(f.yaw);
    const Vector2d local(c * d.x() + s * d.y(), -s * d.x() + c * d.y());
    const Vector2d outside = (local.cwiseAbs() - f.half).cwiseMax(0.0);
    return outside.norm() >= radius + clearance;
  });
}

std::optional<Vector2d> FindPlacement(CounterRng& rng, double radius,
                                      const std::vector<Footprint>& obstacles,
                                      const PerturbConfig& c, double* yaw) {
  for (int attempt = 0; attempt < c.pose_max_tries; ++attempt) {
    const Vector2d xy(rng.Uniform(c.region_x.lo, c.region_x.hi),
                      rng.Uniform(c.region_y.lo, c.region_y.hi));
    const double a = rng.Uniform(-std::numbers::pi, std::numbers::pi);
    if (Free(xy, radius, obstacles, c.placement_clearance)) {
      if (yaw) *yaw = a;
      return xy;
    }
  }
  return std::nullopt;
}

Eigen::Quaterniond YawQuaternion(double yaw) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Vector3d::UnitZ()));
}

// Rescales size for the shape so spheres stay round and cylinders circular.
Vector3d ShapedSize(const Vector3d& scaled, world::Shape shape) {
  const double d = 0.5 * (scaled.x() + scaled.y());
  switch (shape) {
    case world::Shape::kSphere: return Vector3d::Constant(d);
    case world::Shape::kCylinder: return {d, d, scaled.z()};
    case world::Shape::kBox: return scaled;
  }
  return scaled;
}

struct DistractorKind {
  const char* noun;
  world::Shape shape;
  Vector3d size;
  Vector3d color;
};

const std::array<DistractorKind, 6> kDistractors = {{
    {"blue block", world::Shape::kBox, {0.04, 0.04, 0.04}, {0.2, 0.3, 0.85}},
    {"orange ball", world::Shape::kSphere, {0.045, 0.045, 0.045}, {0.95, 0.55, 0.1}},
    {"black cup", world::Shape::kCylinder, {0.055, 0.055, 0.07}, {0.12, 0.12, 0.12}},
    {"white box", world::Shape::kBox, {0.07, 0.05, 0.04}, {0.92, 0.92, 0.9}},
    {"green bottle", world::Shape::kCylinder, {0.045, 0.045, 0.11}, {0.2, 0.6, 0.3}},
    {"yellow sponge", world::Shape::kBox, {0.08, 0.05, 0.025}, {0.95, 0.9, 0.35}},
}};

void NotApplicable(PerturbationSpec& spec, std::string reason) {
  spec.applicable = false;
  spec.not_applicable_reason = std::move(reason);
}

std::string NounOf(const Scene& scene, const std::string& id) {
  if (const auto* o = scene.FindObject(id)) return o->noun;
  if (const auto* a = scene.FindArticulated(id)) return a->base.noun;
  for (const auto& t : scene.toggles) {
    if (t.base.id == id) return t.base.noun;
  }
  throw PerturbationError("object '" + id + "' not in scene");
}

Json RangeToJson(const Range& r) { return Json::array({r.lo, r.hi}); }
Range RangeFromJson(const Json& j) {
  Range r{j.at(0).get<double>(), j.at(1).get<double>()};
  if (r.hi < r.lo) throw std::invalid_argument("range upper bound below lower bound");
  return r;
}

}  // namespace

const std::array<Factor, kNumFactors>& AllFactors() {
  static const std::array<Factor, kNumFactors> all = [] {
    std::array<Factor, kNumFactors> a{};
    for (int i = 0; i < kNumFactors; ++i) a[i] = kFactors[i].factor;
    return a;
  }();
  return all;
}

std::string_view FactorName(Factor factor) { return Info(factor).name; }

Factor ParseFactor(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '_', '-');
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::toupper(c); });
  for (const auto& f : kFactors) {
    if (f.name == n) return f.factor;
  }
  throw std::invalid_argument("unknown perturbation factor '" + std::string(name) + "'");
}

unsigned FactorCategories(Factor factor) { return Info(factor).categories; }

bool IsPurelySemantic(Factor factor) { return FactorCategories(factor) == kSemantic; }

Json PerturbConfigToJson(const PerturbConfig& c) {
  Json palette = Json::array();
  for (const auto& col : c.light_palette) palette.push_back(VectorToJson(col));
  return {{"camera_translation", c.camera_translation},
          {"camera_rotation_degrees", c.camera_rotation_degrees},
          {"light_intensity", RangeToJson(c.light_intensity)},
          {"light_palette", palette},
          {"mass_scale", RangeToJson(c.mass_scale)},
          {"size_scale", RangeToJson(c.size_scale)},
          {"distractors", Json::array({c.min_distractors, c.max_distractors})},
          {"contrast", RangeToJson(c.contrast)},
          {"blur_sigma", RangeToJson(c.blur_sigma)},
          {"region_x", RangeToJson(c.region_x)},
          {"region_y", RangeToJson(c.region_y)},
          {"placement_clearance", c.placement_clearance},
          {"pose_max_tries", c.pose_max_tries},
          {"unseen_pool_size", c.unseen_pool_size}};
}

PerturbConfig PerturbConfigFromJson(const Json& j) {
  PerturbConfig c;
  c.camera_translation = j.value("camera_translation", c.camera_translation);
  c.camera_rotation_degrees = j.value("camera_rotation_degrees", c.camera_rotation_degrees);
  if (j.contains("light_intensity")) c.light_intensity = RangeFromJson(j["light_intensity"]);
  if (j.contains("light_palette")) {
    c.light_palette.clear();
    for (const auto& col : j["light_palette"]) c.light_palette.push_back(VectorFromJson<3>(col, "color"));
    if (c.light_palette.empty()) throw std::invalid_argument("light_palette is empty");
  }
  if (j.contains("mass_scale")) c.mass_scale = RangeFromJson(j["mass_scale"]);
  if (j.contains("size_scale")) c.size_scale = RangeFromJson(j["size_scale"]);
  if (j.contains("distractors")) {
    c.min_distractors = j["distractors"].at(0).get<int>();
    c.max_distractors = j["distractors"].at(1).get<int>();
  }
  if (c.min_distractors < 0 || c.max_distractors < c.min_distractors) {
    throw std::invalid_argument("bad distractor count range");
  }
  if (j.contains("contrast")) c.contrast = RangeFromJson(j["contrast"]);
  if (j.contains("blur_sigma")) c.blur_sigma = RangeFromJson(j["blur_sigma"]);
  if (j.contains("region_x")) c.region_x = RangeFromJson(j["region_x"]);
  if (j.contains("region_y")) c.region_y = RangeFromJson(j["region_y"]);
  c.placement_clearance = j.value("placement_clearance", c.placement_clearance);
  c.pose_max_tries = j.value("pose_max_tries", c.pose_max_tries);
  c.unseen_pool_size = j.value("unseen_pool_size", c.unseen_pool_size);
  if (c.pose_max_tries < 1 || c.unseen_pool_size < 1) {
    throw std::invalid_argument("pose_max_tries and unseen_pool_size must be positive");
  }
  return c;
}

PerturbConfig LoadPerturbConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return PerturbConfigFromJson(Json::parse(in));
}

std::vector<RigidObject> UnseenObjectPool(int size) {
  struct Color {
    const char* name;
    Vector3d rgb;
  };
  static const std::array<Color, 8> kColors = {{{"magenta", {0.85, 0.2, 0.75}},
                                                {"cyan", {0.2, 0.85, 0.9}},
                                                {"brown", {0.5, 0.32, 0.18}},
                                                {"lime", {0.6, 0.9, 0.2}},
                                                {"navy", {0.15, 0.2, 0.5}},
                                                {"olive", {0.5, 0.5, 0.15}},
                                                {"maroon", {0.5, 0.1, 0.15}},
                                                {"beige", {0.9, 0.85, 0.7}}}};
  struct Kind {
    const char* noun;
    world::Shape shape;
  };
  static const std::array<Kind, 6> kKinds = {{{"brick", world::Shape::kBox},
                                              {"crate", world::Shape::kBox},
                                              {"jar", world::Shape::kCylinder},
                                              {"spool", world::Shape::kCylinder},
                                              {"orb", world::Shape::kSphere},
                                              {"bead", world::Shape::kSphere}}};
  std::vector<RigidObject> pool;
  for (int i = 0; i < size; ++i) {
    CounterRng rng(HashCombine(0, static_cast<uint64_t>(i)));
    const Color& color = kColors[rng.UniformInt(kColors.size())];
    const Kind& kind = kKinds[rng.UniformInt(kKinds.size())];
    RigidObject o;
    o.id = "unseen_" + std::to_string(i);
    o.noun = std::string(color.name) + " " + kind.noun;
    o.shape = kind.shape;
    o.size = ShapedSize(Vector3d(rng.Uniform(0.035, 0.055), rng.Uniform(0.035, 0.055),
                                 rng.Uniform(0.035, 0.08)),
                        kind.shape);
    o.mass = rng.Uniform(0.05, 0.3);
    o.color = color.rgb;
    pool.push_back(o);
  }
  return pool;
}

PerturbationSpec Sample(Factor factor, const TaskSpec& task, const Scene& scene, uint64_t seed,
                        const PerturbConfig& c) {
  PerturbationSpec spec;
  spec.factor = factor;
  spec.seed = seed;
  spec.task_id = task.id;
  CounterRng rng(HashCombine(HashCombine(HashString(FactorName(factor)), HashString(task.id)),
                             seed));
  const bool rigid = IsRigidSkill(task.skill);
  const RigidObject* target = scene.FindObject(task.target);
  if (rigid && !target) throw PerturbationError("target '" + task.target + "' not in scene");

  switch (factor) {
    case Factor::kDefault:
      break;
    case Factor::kVAug:
      spec.contrast = rng.Uniform(c.contrast.lo, c.contrast.hi);
      spec.blur_sigma = rng.Uniform(c.blur_sigma.lo, c.blur_sigma.hi);
      break;
    case Factor::kVSc: {
      const int count = c.min_distractors +
                        static_cast<int>(rng.UniformInt(c.max_distractors - c.min_distractors + 1));
      std::vector<Footprint> obstacles = Obstacles(scene, "");
      for (int i = 0; i < count; ++i) {
        const DistractorKind& kind = kDistractors[rng.UniformInt(kDistractors.size())];
        RigidObject o;
        o.id = "distractor_" + std::to_string(i);
        while (scene.HasId(o.id)) o.id += "_";
        o.noun = kind.noun;
        o.shape = kind.shape;
        o.size = kind.size;
        o.color = kind.color;
        o.mass = 0.1;
        o.role = world::ObjectRole::kDistractor;
        double yaw = 0.0;
        const auto xy = FindPlacement(rng, FootprintRadius(o), obstacles, c, &yaw);
        if (!xy) continue;  // crowded scene: fewer distractors
        o.pose.position = Vector3d(xy->x(), xy->y(), scene.table_height + o.HalfHeight());
        o.pose.orientation = YawQuaternion(yaw);
        obstacles.push_back(FootprintOf(o));
        spec.distractors.push_back(o);
      }
      break;
    }
    case Factor::kVView: {
      Vector3d dir(rng.Normal(), rng.Normal(), rng.Normal());
      dir.normalize();
      spec.camera_translation = dir * c.camera_translation * std::cbrt(rng.Uniform());
      Vector3d axis(rng.Normal(), rng.Normal(), rng.Normal());
      axis.normalize();
      const double angle = rng.Uniform() * c.camera_rotation_degrees * std::numbers::pi / 180.0;
      spec.camera_rotation = Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis));
      break;
    }
    case Factor::kVLight:
      for (size_t i = 0; i < scene.lights.size(); ++i) {
        LightChange change;
        change.intensity_scale = rng.Uniform(c.light_intensity.lo, c.light_intensity.hi);
        change.color = c.light_palette[rng.UniformInt(c.light_palette.size())];
        spec.lights.push_back(change);
      }
      break;
    case Factor::kSProp:
    case Factor::kSLang:
    case Factor::kSMo:
    case Factor::kSAff:
    case Factor::kSInt:
      // Row length is validated at task-set load; the shipped table has 5.
      spec.variant_index = static_cast<int>(rng.UniformInt(5));
      break;
    case Factor::kBHobj:
      if (!rigid) {
        NotApplicable(spec, "target is not a rigid object");
        break;
      }
      spec.mass_scale = std::exp(rng.Uniform(std::log(c.mass_scale.lo), std::log(c.mass_scale.hi)));
      break;
    case Factor::kVbPose: {
      const RigidObject* body = target;
      if (!body) {
        for (const auto& t : scene.toggles) {
          if (t.base.id == task.target) body = &t.base;
        }
      }
      if (!body) {
        NotApplicable(spec, "articulated targets have a fixed mount");
        break;
      }
      const auto xy = FindPlacement(rng, FootprintRadius(*body), Obstacles(scene, task.target), c,
                                    &spec.yaw);
      if (!xy) {
        throw PerturbationError("VB-POSE: no free placement for '" + task.target + "' after " +
                                std::to_string(c.pose_max_tries) + " tries");
      }
      spec.position_xy = *xy;
      break;
    }
    case Factor::kVbMobj:
      if (!rigid) {
        NotApplicable(spec, "target is not a rigid object");
        break;
      }
      for (int i = 0; i < 3; ++i) spec.size_scale(i) = rng.Uniform(c.size_scale.lo, c.size_scale.hi);
      spec.shape = static_cast<world::Shape>(rng.UniformInt(3));
      break;
    case Factor::kSbNoun: {
      if (!rigid) {
        NotApplicable(spec, "no other object supports this skill");
        break;
      }
      std::vector<const RigidObject*> candidates;
      for (const auto& o : scene.objects) {
        if (o.role != world::ObjectRole::kManipulable || o.id == task.target) continue;
        if (task.destination && o.id == *task.destination) continue;
        candidates.push_back(&o);
      }
      if (candidates.empty()) {
        NotApplicable(spec, "no other manipulable object in the scene");
        break;
      }
      std::sort(candidates.begin(), candidates.end(),
                [](const RigidObject* a, const RigidObject* b) { return a->id < b->id; });
      const RigidObject* pick = candidates[rng.UniformInt(candidates.size())];
      spec.new_target = pick->id;
      spec.new_target_noun = pick->noun;
      break;
    }
    case Factor::kSbVrb:
      if (!task.alternate_skill) {
        NotApplicable(spec, "task has no compatible alternate skill");
        break;
      }
      if (world::NeedsDestination(*task.alternate_skill) && !task.destination) {
        NotApplicable(spec, "alternate skill needs a destination");
        break;
      }
      spec.new_skill = *task.alternate_skill;
      spec.new_target = task.alternate_target.value_or(task.target);
      spec.new_target_noun = NounOf(scene, spec.new_target);
      break;
    case Factor::kVsbNobj: {
      if (!rigid) {
        NotApplicable(spec, "unseen objects replace rigid targets only");
        break;
      }
      const auto pool = UnseenObjectPool(c.unseen_pool_size);
      RigidObject o = pool[rng.UniformInt(pool.size())];
      while (scene.HasId(o.id)) o.id += "_";
      o.pose.position = target->pose.position;
      o.pose.position.z() = target->Bottom() + o.HalfHeight();
      o.pose.orientation = YawQuaternion(target->pose.Yaw());
      spec.unseen_object = o;
      spec.new_target = o.id;
      spec.new_target_noun = o.noun;
      break;
    }
  }
  return spec;
}

std::pair<Scene, TaskSpec> ApplyToScene(const PerturbationSpec& spec, const Scene& scene,
                                        const TaskSpec& task, const PerturbConfig& c) {
  Scene out = scene;
  TaskSpec t = task;
  if (!spec.applicable) return {out, t};
  if (spec.task_id != task.id) {
    throw PerturbationError("spec sampled for task '" + spec.task_id + "' applied to '" +
                            task.id + "'");
  }
  auto destination_noun = [&]() {
    return t.destination ? NounOf(out, *t.destination) : std::string();
  };
  auto require_target = [&]() -> RigidObject& {
    RigidObject* o = out.FindObject(task.target);
    if (!o) throw PerturbationError("target '" + task.target + "' not in scene");
    return *o;
  };

  switch (spec.factor) {
    case Factor::kDefault:
    case Factor::kVAug:
    case Factor::kSProp:
    case Factor::kSLang:
    case Factor::kSMo:
    case Factor::kSAff:
    case Factor::kSInt:
      break;
    case Factor::kVSc:
      for (const auto& d : spec.distractors) {
        if (out.HasId(d.id)) throw PerturbationError("distractor id '" + d.id + "' in use");
        out.objects.push_back(d);
      }
      break;
    case Factor::kVView: {
      world::Camera* cam = out.FindCamera(world::kExternalCamera);
      if (!cam) throw PerturbationError("scene has no external camera");
      cam->pose.position += spec.camera_translation;
      cam->pose.orientation = (cam->pose.orientation * spec.camera_rotation).normalized();
      break;
    }
    case Factor::kVLight:
      if (spec.lights.size() != out.lights.size()) {
        throw PerturbationError("V-LIGHT spec has a different light count than the scene");
      }
      for (size_t i = 0; i < out.lights.size(); ++i) {
        out.lights[i].intensity *= spec.lights[i].intensity_scale;
        out.lights[i].color = spec.lights[i].color;
      }
      break;
    case Factor::kBHobj:
      require_target().mass *= spec.mass_scale;
      break;
    case Factor::kVbPose: {
      RigidObject* body = out.FindObject(task.target);
      if (!body) {
        for (auto& tog : out.toggles) {
          if (tog.base.id == task.target) body = &tog.base;
        }
      }
      if (!body) throw PerturbationError("target '" + task.target + "' not in scene");
      if (!Free(spec.position_xy, FootprintRadius(*body), Obstacles(out, task.target),
                c.placement_clearance)) {
        throw PerturbationError("VB-POSE placement collides with another object");
      }
      body->pose.position.head<2>() = spec.position_xy;
      body->pose.orientation = YawQuaternion(spec.yaw);
      break;
    }
    case Factor::kVbMobj: {
      RigidObject& o = require_target();
      const double bottom = o.Bottom();
      o.shape = spec.shape;
      o.size = ShapedSize(o.size.cwiseProduct(spec.size_scale), spec.shape);
      o.pose.position.z() = bottom + o.HalfHeight();
      break;
    }
    case Factor::kSbNoun:
      if (!out.FindObject(spec.new_target)) {
        throw PerturbationError("SB-NOUN target '" + spec.new_target + "' not in scene");
      }
      t.target = spec.new_target;
      t.instruction = world::NeedsDestination(t.skill)
                          ? TemplateInstruction(t.skill, spec.new_target_noun, destination_noun())
                          : TemplateInstruction(t.skill, spec.new_target_noun);
      break;
    case Factor::kSbVrb: {
      t.skill = spec.new_skill;
      t.target = spec.new_target;
      if (!world::NeedsDestination(t.skill)) t.destination.reset();
      if (world::IsArticulatedSkill(t.skill)) {
        world::ArticulatedObject* a = out.FindArticulated(t.target);
        if (!a) throw PerturbationError("SB-VRB target '" + t.target + "' is not articulated");
        a->SetPosition(t.skill == Skill::kOpen ? a->range_min : a->range_max);
      }
      t.instruction = TemplateInstruction(t.skill, spec.new_target_noun, destination_noun());
      t.set = world::IsArticulatedSkill(t.skill) ? world::TaskSet::kArticulated
                                                 : world::TaskSet::kBase;
      break;
    }
    case Factor::kVsbNobj: {
      if (!spec.unseen_object) throw PerturbationError("VSB-NOBJ spec has no object");
      require_target();
      for (auto& o : out.objects) {
        if (o.id == task.target) o = *spec.unseen_object;
      }
      t.target = spec.unseen_object->id;
      t.instruction = TemplateInstruction(t.skill, spec.unseen_object->noun, destination_noun());
      break;
    }
  }
  out.Validate();
  return {out, t};
}

InstructionVariantTable::InstructionVariantTable(
    std::map<std::string, std::map<Factor, std::vector<std::string>>> rows)
    : rows_(std::move(rows)) {}

const std::vector<std::string>& InstructionVariantTable::Variants(const std::string& task_id,
                                                                  Factor factor) const {
  const auto row = rows_.find(task_id);
  if (row != rows_.end()) {
    const auto it = row->second.find(factor);
    if (it != row->second.end()) return it->second;
  }
  throw std::invalid_argument("no instruction variants for task '" + task_id + "' and " +
                              std::string(FactorName(factor)));
}

void InstructionVariantTable::ValidateFor(const TaskSpec& task) const {
  for (Factor f : AllFactors()) {
    if (!IsPurelySemantic(f)) continue;
    const auto& v = Variants(task.id, f);
    if (v.empty()) {
      throw std::invalid_argument("empty " + std::string(FactorName(f)) + " variants for task '" +
                                  task.id + "'");
    }
    if (std::find(v.begin(), v.end(), task.instruction) != v.end()) {
      throw std::invalid_argument("variant list for task '" + task.id +
                                  "' repeats the default instruction");
    }
  }
}

InstructionVariantTable InstructionVariantTableFromJson(const Json& j) {
  std::map<std::string, std::map<Factor, std::vector<std::string>>> rows;
  for (const auto& [task_id, factors] : j.items()) {
    for (const auto& [name, list] : factors.items()) {
      const Factor f = ParseFactor(name);
      if (!IsPurelySemantic(f)) {
        throw std::invalid_argument("variant table entry for non-semantic factor " + name);
      }
      rows[task_id][f] = list.get<std::vector<std::string>>();
    }
  }
  return InstructionVariantTable(std::move(rows));
}

InstructionVariantTable LoadInstructionVariants(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return InstructionVariantTableFromJson(Json::parse(in));
}

std::string TemplateInstruction(Skill skill, const std::string& target,
                                const std::string& destination) {
  switch (skill) {
    case Skill::kPut: return "put the " + target + " in the " + destination;
    case Skill::kPick: return "pick up the " + target;
    case Skill::kStack: return "stack the " + target + " on the " + destination;
    case Skill::kPush: return "push the " + target;
    case Skill::kRotate: return "rotate the " + target;
    case Skill::kOpen: return "open the " + target;
    case Skill::kClose: return "close the " + target;
  }
  throw std::invalid_argument("unknown skill");
}

std::string ApplyToInstruction(const PerturbationSpec& spec, const TaskSpec& task,
                               const InstructionVariantTable& table) {
  if (!spec.applicable || !IsPurelySemantic(spec.factor)) return task.instruction;
  const auto& variants = table.Variants(task.id, spec.factor);
  return variants[static_cast<size_t>(spec.variant_index) % variants.size()];
}

render::Image ApplyToObservation(const PerturbationSpec& spec, const render::Image& image) {
  if (!spec.applicable || spec.factor != Factor::kVAug) return image;
  return render::ApplyPhotometric(image, spec.contrast, spec.blur_sigma);
}

Json PerturbationSpecToJson(const PerturbationSpec& s) {
  Json j = {{"factor", FactorName(s.factor)},
            {"seed", s.seed},
            {"task_id", s.task_id},
            {"applicable", s.applicable}};
  if (!s.applicable) {
    j["not_applicable_reason"] = s.not_applicable_reason;
    return j;
  }
  switch (s.factor) {
    case Factor::kDefault: break;
    case Factor::kVAug:
      j["contrast"] = s.contrast;
      j["blur_sigma"] = s.blur_sigma;
      break;
    case Factor::kVSc: {
      Json d = Json::array();
      for (const auto& o : s.distractors) d.push_back(world::RigidObjectToJson(o));
      j["distractors"] = d;
      break;
    }
    case Factor::kVView:
      j["camera_translation"] = VectorToJson(s.camera_translation);
      j["camera_rotation"] = QuaternionToJson(s.camera_rotation);
      break;
    case Factor::kVLight: {
      Json l = Json::array();
      for (const auto& c : s.lights) {
        l.push_back({{"intensity_scale", c.intensity_scale}, {"color", VectorToJson(c.color)}});
      }
      j["lights"] = l;
      break;
    }
    case Factor::kSProp:
    case Factor::kSLang:
    case Factor::kSMo:
    case Factor::kSAff:
    case Factor::kSInt:
      j["variant_index"] = s.variant_index;
      break;
    case Factor::kBHobj: j["mass_scale"] = s.mass_scale; break;
    case Factor::kVbPose:
      j["position_xy"] = VectorToJson(s.position_xy);
      j["yaw"] = s.yaw;
      break;
    case Factor::kVbMobj:
      j["size_scale"] = VectorToJson(s.size_scale);
      j["shape"] = world::ShapeName(s.shape);
      break;
    case Factor::kSbNoun:
      j["new_target"] = s.new_target;
      j["new_target_noun"] = s.new_target_noun;
      break;
    case Factor::kSbVrb:
      j["new_skill"] = world::SkillName(s.new_skill);
      j["new_target"] = s.new_target;
      j["new_target_noun"] = s.new_target_noun;
      break;
    case Factor::kVsbNobj:
      j["unseen_object"] = world::RigidObjectToJson(*s.unseen_object);
      j["new_target"] = s.new_target;
      j["new_target_noun"] = s.new_target_noun;
      break;
  }
  return j;
}

PerturbationSpec PerturbationSpecFromJson(const Json& j) {
  PerturbationSpec s;
  s.factor = ParseFactor(j.at("factor").get<std::string>());
  s.seed = j.at("seed").get<uint64_t>();
  s.task_id = j.at("task_id").get<std::string>();
  s.applicable = j.value("applicable", true);
  s.not_applicable_reason = j.value("not_applicable_reason", std::string());
  s.contrast = j.value("contrast", s.contrast);
  s.blur_sigma = j.value("blur_sigma", s.blur_sigma);
  if (j.contains("distractors")) {
    for (const auto& d : j["distractors"]) s.distractors.push_back(world::RigidObjectFromJson(d));
  }
  if (j.contains("camera_translation")) {
    s.camera_translation = VectorFromJson<3>(j["camera_translation"], "camera_translation");
  }
  if (j.contains("camera_rotation")) s.camera_rotation = QuaternionFromJson(j["camera_rotation"]);
  if (j.contains("lights")) {
    for (const auto& l : j["lights"]) {
      s.lights.push_back({l.at("intensity_scale").get<double>(), VectorFromJson<3>(l.at("color"), "color")});
    }
  }
  s.variant_index = j.value("variant_index", 0);
  s.mass_scale = j.value("mass_scale", 1.0);
  if (j.contains("position_xy")) s.position_xy = VectorFromJson<2>(j["position_xy"], "position_xy");
  s.yaw = j.value("yaw", 0.0);
  if (j.contains("size_scale")) s.size_scale = VectorFromJson<3>(j["size_scale"], "size_scale");
  if (j.contains("shape")) s.shape = world::ParseShape(j["shape"].get<std::string>());
  s.new_target = j.value("new_target", std::string());
  s.new_target_noun = j.value("new_target_noun", std::string());
  if (j.contains("new_skill")) s.new_skill = world::ParseSkill(j["new_skill"].get<std::string>());
  if (j.contains("unseen_object")) s.unseen_object = world::RigidObjectFromJson(j["unseen_object"]);
  return s;
}

}  // namespace realm::perturb
