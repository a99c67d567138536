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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <boost/math/special_functions/beta.hpp>

#include "realm/arm/params_io.h"
#include "realm/common/rng.h"
#include "realm/harness/episode.h"
#include "realm/harness/plan.h"
#include "realm/harness/scripted.h"
#include "realm/metrics/metrics.h"
#include "realm/perturb/perturb.h"
#include "realm/progression/progression.h"
#include "realm/sysid/cma_es.h"
#include "realm/sysid/sysid.h"
#include "realm/world/scene_io.h"
#include "realm/world/task.h"
#include "realm/world/world.h"

namespace realm {
namespace {

namespace fs = std::filesystem;
using harness::CellStatus;
using harness::EvalPlan;
using harness::PlanResult;
using metrics::Cell;
using metrics::ProgressionTable;
using perturb::Factor;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Accumulates sub-check results into one criterion line.
class Checks {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failures_.push_back(what);
    }
  }
  void Note(const std::string& text) { notes_.push_back(text); }
  Outcome Finish() const {
    std::string detail;
    for (const auto& n : notes_) detail += (detail.empty() ? "" : "; ") + n;
    for (size_t i = 0; i < failures_.size() && i < 5; ++i) {
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + failures_[i];
    }
    if (failures_.size() > 5) {
      detail += "; and " + std::to_string(failures_.size() - 5) + " more failures";
    }
    return {pass_, detail};
  }

 private:
  bool pass_ = true;
  std::vector<std::string> notes_;
  std::vector<std::string> failures_;
};

std::string Num(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

struct Context {
  fs::path data_dir;
  fs::path work_dir;
  int workers = 4;
  int rollouts = 25;
  harness::EpisodeConfig config;
  std::vector<world::TaskSpec> tasks;
  arm::JointVector home;
};

arm::ArmParams SampleTruth(const arm::ArmParams& base, uint64_t seed) {
  CounterRng rng(seed);
  arm::ArmParams t = base;
  for (int j = 0; j < arm::kNumJoints; ++j) t.friction(j) *= std::exp2(rng.Uniform(-1, 1));
  for (int j = 0; j < arm::kNumJoints; ++j) t.armature(j) *= std::exp2(rng.Uniform(-1, 1));
  return t;
}

// Alignment loss: zero on self-generated data and a hand-computed residual.
Outcome AlignmentLoss(const Context& ctx) {
  Checks c;
  const arm::ArmParams& base = ctx.config.params;
  const arm::ArmParams truth = SampleTruth(base, 3);
  const sysid::SysIdDataset data = sysid::SyntheticDataset(truth, ctx.home, 3, 150, 7);
  const double self = sysid::AlignmentLoss(sysid::EncodeParams(truth), data, base);
  c.Note("self-generated loss " + Num(self, 3) + " (<= 1e-18)");
  c.Expect(self <= 1e-18, "self-generated loss");

  sysid::TrajectoryPair pair;
  pair.initial_state.q = ctx.home;
  pair.commands = {{ctx.home, 1.0}};
  pair.q_real = {ctx.home};
  pair.q_real[0](0) += 0.1;
  const double hand = sysid::AlignmentLoss(sysid::EncodeParams(base), {{pair}}, base);
  c.Note("hand example " + Num(hand, 17) + " (0.01 +- 1e-15)");
  c.Expect(std::fabs(hand - 0.01) <= 1e-15, "hand example");
  return c.Finish();
}

// Identification recovers hidden friction and armature from three pairs.
Outcome SysIdRecovery(const Context& ctx) {
  Checks c;
  const arm::ArmParams& base = ctx.config.params;
  const arm::ArmParams truth = SampleTruth(base, 11);
  const sysid::SysIdDataset data = sysid::SyntheticDataset(truth, ctx.home, 3, 150, 5);
  sysid::IdentifyOptions o;
  o.seed = 3;
  o.workers = 1;
  const sysid::IdentifyResult r = sysid::Identify(data, base, o);
  double worst = 0.0;
  for (int j = 0; j < arm::kNumJoints; ++j) {
    worst = std::max(worst, std::fabs(r.params.friction(j) / truth.friction(j) - 1.0));
    worst = std::max(worst, std::fabs(r.params.armature(j) / truth.armature(j) - 1.0));
  }
  c.Note("3 pairs x 150 ticks, worst relative error " + Num(100 * worst, 3) + "% (<= 5%)");
  c.Note("final loss " + Num(r.final_loss, 3) + " (< 1e-3), " + std::to_string(r.evaluations) +
         " evaluations");
  c.Expect(worst <= 0.05, "parameter recovery");
  c.Expect(r.final_loss < 1e-3, "final loss");
  return c.Finish();
}

double Sphere(const Eigen::VectorXd& x) { return x.squaredNorm(); }

double Rosenbrock(const Eigen::VectorXd& x) {
  double f = 0.0;
  for (int i = 0; i + 1 < x.size(); ++i) {
    f += 100.0 * std::pow(x(i + 1) - x(i) * x(i), 2) + std::pow(1.0 - x(i), 2);
  }
  return f;
}

Outcome CmaEs(const Context&) {
  Checks c;
  sysid::CmaEsOptions sphere_opts;
  sphere_opts.budget = 6000;
  sphere_opts.seed = 1;
  sphere_opts.init_sigma = 1.0;
  const auto s1 = sysid::CmaEsMinimize(Sphere, Eigen::VectorXd::Constant(14, 3.0), sphere_opts);
  const auto s2 = sysid::CmaEsMinimize(Sphere, Eigen::VectorXd::Constant(14, 3.0), sphere_opts);
  c.Note("sphere " + Num(s1.value, 3) + " in " + std::to_string(s1.evaluations) + " evals");
  c.Expect(s1.value < 1e-10 && s1.evaluations <= 6000, "sphere");

  sysid::CmaEsOptions rosen_opts;
  rosen_opts.budget = 60000;
  rosen_opts.seed = 2;
  const auto r1 = sysid::CmaEsMinimize(Rosenbrock, Eigen::VectorXd::Zero(14), rosen_opts);
  const auto r2 = sysid::CmaEsMinimize(Rosenbrock, Eigen::VectorXd::Zero(14), rosen_opts);
  c.Note("rosenbrock " + Num(r1.value, 3) + " in " + std::to_string(r1.evaluations) + " evals");
  c.Expect(r1.value < 1e-6 && r1.evaluations <= 60000, "rosenbrock");

  const bool same = s1.x == s2.x && s1.value == s2.value && s1.trace == s2.trace &&
                    r1.x == r2.x && r1.value == r2.value && r1.trace == r2.trace;
  c.Note(same ? "reruns bit-identical" : "reruns differ");
  c.Expect(same, "determinism");
  return c.Finish();
}

// Independent pairwise enumeration of rank violations.
double BruteForceMmrv(const std::vector<double>& real, const std::vector<double>& sim) {
  const size_t n = real.size();
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double worst = 0.0;
    for (size_t j = 0; j < n; ++j) {
      const bool sim_tied = sim[i] == sim[j], real_tied = real[i] == real[j];
      if (!sim_tied && !real_tied && (sim[i] < sim[j]) != (real[i] < real[j])) {
        worst = std::max(worst, std::fabs(real[i] - real[j]));
      }
    }
    sum += worst;
  }
  return sum / static_cast<double>(n);
}

Outcome Mmrv(const Context&) {
  Checks c;
  CounterRng rng(2024);
  int matches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.UniformInt(4));
    std::vector<double> real(n), sim(n);
    for (int i = 0; i < n; ++i) {
      real[i] = rng.Uniform() < 0.5 ? static_cast<double>(rng.UniformInt(6)) / 5.0 : rng.Uniform();
      sim[i] = rng.Uniform() < 0.5 ? static_cast<double>(rng.UniformInt(6)) / 5.0 : rng.Uniform();
    }
    if (metrics::Mmrv(real, sim) == BruteForceMmrv(real, sim)) ++matches;
  }
  c.Note(std::to_string(matches) + "/1000 exact matches with brute force");
  c.Expect(matches == 1000, "brute-force equivalence");

  const std::vector<double> real = {0.8, 0.2}, sim = {0.1, 0.9};
  const double v = metrics::Mmrv(real, sim);
  // 0.8 - 0.2 rounds to the double just above 0.6.
  const double ulps = std::fabs(v - 0.6) / (std::nextafter(0.6, 1.0) - 0.6);
  c.Note("worked example " + Num(v, 17) + " (" + Num(ulps, 2) + " ulp from 0.6, <= 4)");
  c.Expect(ulps <= 4.0 && v == 0.8 - 0.2, "worked example");
  return c.Finish();
}

Outcome Rmsd(const Context&) {
  Checks c;
  ProgressionTable t;
  t.Set("m", "a", metrics::kDefaultFactor, {0.5, 25, 0});
  t.Set("m", "b", metrics::kDefaultFactor, {0.3, 25, 0});
  t.Set("m", "a", "V-AUG", {0.5, 25, 0});
  t.Set("m", "b", "V-AUG", {0.7, 25, 0});
  const double v = metrics::Rmsd(t, "V-AUG");
  c.Note("hand example " + Num(v, 17) + " (0.28284271247461906 +- 1e-12)");
  c.Expect(std::fabs(v - 0.28284271247461906) <= 1e-12, "hand example");

  CounterRng rng(77);
  int agree = 0, zero_cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    ProgressionTable r;
    bool equal = true;
    const bool make_equal = rng.Uniform() < 0.3;
    for (const char* m : {"x", "y"}) {
      for (const char* task : {"p", "q", "s"}) {
        const double base = static_cast<double>(rng.UniformInt(26)) / 25.0;
        double pert = base;
        if (!make_equal && rng.Uniform() < 0.5) pert = static_cast<double>(rng.UniformInt(26)) / 25.0;
        equal = equal && pert == base;
        r.Set(m, task, metrics::kDefaultFactor, {base, 25, 0});
        r.Set(m, task, "F", {pert, 25, 0});
      }
    }
    zero_cases += equal;
    if ((metrics::Rmsd(r, "F") == 0.0) == equal) ++agree;
  }
  c.Note("zero iff equal on " + std::to_string(agree) + "/1000 random tables (" +
         std::to_string(zero_cases) + " equal)");
  c.Expect(agree == 1000, "zero iff equal");
  return c.Finish();
}

Outcome BetaPosterior(const Context&) {
  Checks c;
  const metrics::BetaPosterior p = metrics::SuccessPosterior(18, 25);
  c.Note("Beta(" + Num(p.alpha) + ", " + Num(p.beta) + "), mean " + Num(p.mean, 17));
  c.Expect(p.alpha == 19.0 && p.beta == 8.0, "parameters");
  c.Expect(std::fabs(p.mean - 19.0 / 27.0) <= 1e-12, "mean");
  const double lo = boost::math::ibeta(19.0, 8.0, p.lower);
  const double hi = boost::math::ibeta(19.0, 8.0, p.upper);
  c.Note("CDF at interval ends " + Num(lo, 12) + ", " + Num(hi, 12) + " (+- 1e-9)");
  c.Expect(std::fabs(lo - 0.025) <= 1e-9 && std::fabs(hi - 0.975) <= 1e-9, "interval");
  return c.Finish();
}

Outcome Rubrics(const Context& ctx) {
  Checks c;
  using V = std::vector<std::string>;
  using world::Skill;
  const std::map<Skill, V> expected = {
      {Skill::kPut, {"Reach", "Grasp", "Lift", "Move Close", "IsInside"}},
      {Skill::kPick, {"Reach", "Grasp", "Lift"}},
      {Skill::kStack, {"Reach", "Grasp", "Lift", "Move Close", "IsOnTop"}},
      {Skill::kPush, {"Reach", "Touch", "IsToggledOn"}},
      {Skill::kRotate, {"Reach", "Grasp", "Rotate 45"}},
      {Skill::kOpen, {"Reach", "Touch & Move", "Open 50%", "Open 75%", "Open 95%"}},
      {Skill::kClose, {"Reach", "Touch & Move", "Closed 50%", "Closed 75%", "Closed 95%"}}};
  int matching = 0;
  for (const auto& [skill, stages] : expected) {
    if (progression::RubricFor(skill).stages == stages) ++matching;
  }
  c.Note(std::to_string(matching) + "/7 skill rubrics match");
  c.Expect(matching == 7, "rubric tables");

  auto find = [&](const std::string& id) {
    for (const auto& t : ctx.tasks) {
      if (t.id == id) return t;
    }
    throw std::runtime_error("task " + id + " missing");
  };
  auto initial = [&](const world::TaskSpec& task) {
    world::WorldState s = world::MakeWorld(world::LoadScene(task.scene_path), ctx.config.home,
                                           ctx.config.params);
    s.tool.position = Eigen::Vector3d(0.0, 0.0, 1.0);
    return s;
  };
  auto push = [](std::vector<world::WorldState>& trace, world::WorldState s) {
    s.arm.time = trace.empty() ? 0.0 : trace.back().arm.time + 1.0 / 15.0;
    s.step_index = static_cast<int>(trace.size());
    trace.push_back(std::move(s));
  };

  const world::TaskSpec pick = find("pick_can");
  world::WorldState s = initial(pick);
  std::vector<world::WorldState> trace;
  push(trace, s);
  s.tool.position = s.scene.FindObject(pick.target)->pose.position + Eigen::Vector3d(0, 0, 0.03);
  for (int i = 0; i < 5; ++i) push(trace, s);
  const double pick_score =
      progression::ScoreTrace(trace, pick, progression::RubricFor(pick.skill)).score;
  c.Note("pick reach-only " + Num(pick_score, 17) + " (1/3)");
  c.Expect(pick_score == 1.0 / 3.0, "pick reach-only");

  const world::TaskSpec open = find("open_drawer");
  s = initial(open);
  trace.clear();
  push(trace, s);
  auto* drawer = s.scene.FindArticulated(open.target);
  for (double f : {0.0, 0.2, 0.5, 0.8, 0.8, 0.8}) {
    drawer->SetPosition(drawer->range_min + f * (drawer->range_max - drawer->range_min));
    s.tool.position = drawer->HandlePoint();
    push(trace, s);
  }
  const double open_score =
      progression::ScoreTrace(trace, open, progression::RubricFor(open.skill)).score;
  c.Note("open at 80% " + Num(open_score, 17) + " (4/5)");
  c.Expect(open_score == 4.0 / 5.0, "open at 80%");
  return c.Finish();
}

EvalPlan OrderingPlan(const Context& ctx) {
  EvalPlan plan;
  plan.models = {{"expert", "scripted:expert"},
                 {"noisy_0", "scripted:noisy:0"},
                 {"noisy_0.02", "scripted:noisy:0.02"},
                 {"noisy_0.05", "scripted:noisy:0.05"},
                 {"noisy_0.1", "scripted:noisy:0.1"},
                 {"random", "scripted:random"}};
  plan.tasks = ctx.tasks;
  plan.factors = {Factor::kDefault};
  plan.rollouts_per_cell = ctx.rollouts;
  plan.base_seed = 2026;
  return plan;
}

harness::ModelPolicyFactory ScriptedFactory(const Context& ctx) {
  return [&ctx](const harness::ModelSpec& m) {
    return harness::MakePolicy(m, ctx.config.params, harness::RemoteOptions{});
  };
}

PlanResult RunWithRecords(const Context& ctx, const EvalPlan& plan, const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  harness::RunOptions o;
  o.workers = ctx.workers;
  o.records_dir = dir;
  return harness::RunPlan(plan, ctx.config, ScriptedFactory(ctx), o);
}

double ModelMean(const ProgressionTable& t, const std::string& model) {
  double sum = 0.0;
  int n = 0;
  for (const auto& [key, cell] : t.cells()) {
    if (std::get<0>(key) == model) {
      sum += cell.mean;
      ++n;
    }
  }
  return n ? sum / n : std::nan("");
}

Outcome EndToEnd(const Context& ctx) {
  Checks c;
  const EvalPlan plan = OrderingPlan(ctx);
  const auto t0 = std::chrono::steady_clock::now();
  const PlanResult r = RunWithRecords(ctx, plan, ctx.work_dir / "ordering_a");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const ProgressionTable& t = r.table;
  int complete = 0;
  for (const auto& cell : r.cells) complete += cell.status == CellStatus::kComplete;
  c.Expect(complete == static_cast<int>(r.cells.size()), "all cells complete");

  int expert_perfect = 0;
  for (const auto& task : ctx.tasks) {
    const Cell* cell = t.Find("expert", task.id, metrics::kDefaultFactor);
    if (cell && cell->mean == 1.0 && cell->count == ctx.rollouts) ++expert_perfect;
  }
  c.Note("expert 1.0 on " + std::to_string(expert_perfect) + "/" +
         std::to_string(ctx.tasks.size()) + " tasks");
  c.Expect(expert_perfect == static_cast<int>(ctx.tasks.size()), "expert perfect");

  const std::vector<std::string> sweep = {"noisy_0", "noisy_0.02", "noisy_0.05", "noisy_0.1"};
  std::string means;
  for (const auto& m : sweep) means += (means.empty() ? "" : " >= ") + Num(ModelMean(t, m), 4);
  c.Note("noisy means over sigma {0, .02, .05, .1}: " + means);
  int monotone_tasks = 0;
  for (const auto& task : ctx.tasks) {
    bool ok = true;
    for (size_t i = 1; i < sweep.size(); ++i) {
      const Cell* a = t.Find(sweep[i - 1], task.id, metrics::kDefaultFactor);
      const Cell* b = t.Find(sweep[i], task.id, metrics::kDefaultFactor);
      ok = ok && a && b && b->mean <= a->mean;
    }
    if (ok) {
      ++monotone_tasks;
    } else {
      c.Expect(false, "monotone on " + task.id);
    }
  }
  bool pooled_monotone = true;
  for (size_t i = 1; i < sweep.size(); ++i) {
    pooled_monotone = pooled_monotone && ModelMean(t, sweep[i]) <= ModelMean(t, sweep[i - 1]);
  }
  c.Expect(pooled_monotone, "pooled monotone");
  c.Note("monotone on " + std::to_string(monotone_tasks) + "/" +
         std::to_string(ctx.tasks.size()) + " tasks");

  const std::vector<double> known = {2.0, 1.0, 0.0};
  const std::vector<double> sim = {ModelMean(t, "expert"), ModelMean(t, "noisy_0.05"),
                                   ModelMean(t, "random")};
  const double mmrv = metrics::Mmrv(known, sim);
  c.Note("expert " + Num(sim[0], 4) + " > noisy(0.05) " + Num(sim[1], 4) + " > random " +
         Num(sim[2], 4) + ", MMRV " + Num(mmrv));
  c.Expect(sim[0] > sim[1] && sim[1] > sim[2], "strict ordering");
  c.Expect(mmrv == 0.0, "MMRV against known ordering");
  double task_mmrv = 0.0;
  for (const auto& task : ctx.tasks) {
    const std::vector<double> per = {t.At("expert", task.id, metrics::kDefaultFactor).mean,
                                     t.At("noisy_0.05", task.id, metrics::kDefaultFactor).mean,
                                     t.At("random", task.id, metrics::kDefaultFactor).mean};
    task_mmrv = std::max(task_mmrv, metrics::Mmrv(known, per));
  }
  c.Note("worst per-task MMRV " + Num(task_mmrv));
  c.Note(std::to_string(ctx.rollouts) + " rollouts/cell, " + std::to_string(plan.NumRollouts()) +
         " episodes, " + std::to_string(ctx.workers) + " workers, " + Num(seconds, 4) +
         " s (< 900)");
  c.Expect(ctx.rollouts >= 25, "25 rollouts per cell");
  c.Expect(seconds < 900.0, "runtime");
  return c.Finish();
}

// JSON pointers that differ between two scenes.
std::vector<std::string> ChangedPaths(const world::Scene& a, const world::Scene& b) {
  std::vector<std::string> paths;
  for (const auto& op : Json::diff(world::SceneToJson(a), world::SceneToJson(b))) {
    paths.push_back(op["path"].get<std::string>());
  }
  return paths;
}

// Scene fields each factor may change.
std::regex AllowedPaths(Factor f, const std::string& target) {
  switch (f) {
    case Factor::kVSc: return std::regex("/objects/(\\d+|-)");
    case Factor::kVView: return std::regex("/cameras/0/pose/.*");
    case Factor::kVLight: return std::regex("/lights/\\d+/(intensity|color)(/\\d)?");
    case Factor::kBHobj: return std::regex(target + "/mass");
    case Factor::kVbPose:
      return std::regex("/(objects|toggles)/\\d+/(body/)?pose/(position/[01]|orientation/\\d)");
    case Factor::kVbMobj: return std::regex(target + "/(shape|size/\\d|pose/position/2)");
    case Factor::kSbVrb: return std::regex("/articulated/0/position");
    case Factor::kVsbNobj: return std::regex(target + "/.*");
    default: return std::regex("^$");
  }
}

Outcome PerturbationSemantics(const Context& ctx) {
  Checks c;
  int semantic_runs = 0, semantic_same = 0;
  int diffs = 0, diffs_ok = 0;
  int repro = 0, repro_ok = 0;
  for (const auto& task : ctx.tasks) {
    const world::Scene scene = world::LoadScene(task.scene_path);
    harness::ExpertPolicy expert;
    const harness::RolloutRecord base =
        harness::RunEpisode(task, scene, perturb::Sample(Factor::kDefault, task, scene, 0),
                            expert, 0, ctx.config);
    std::vector<arm::ActionCommand> actions;
    for (const auto& s : base.steps) actions.push_back(s.action);

    std::string target_path;
    for (size_t i = 0; i < scene.objects.size(); ++i) {
      if (scene.objects[i].id == task.target) target_path = "/objects/" + std::to_string(i);
    }
    for (Factor f : perturb::AllFactors()) {
      const std::string label = task.id + "/" + std::string(perturb::FactorName(f));
      if (perturb::IsPurelySemantic(f)) {
        for (uint64_t seed : {1u, 2u, 3u}) {
          const auto spec = perturb::Sample(f, task, scene, seed, ctx.config.perturb);
          // Replays the expert's actions open loop.
          class Fixed : public harness::Policy {
           public:
            explicit Fixed(const std::vector<arm::ActionCommand>& a) : a_(a) {}
            std::string Id() const override { return "fixed"; }
            harness::Capabilities capabilities() const override { return {false, false}; }
            void Reset(const harness::EpisodeStart&) override { i_ = 0; }
            std::vector<arm::ActionCommand> Act(const harness::Observation&) override {
              return {a_.at(i_++)};
            }
            const std::vector<arm::ActionCommand>& a_;
            size_t i_ = 0;
          } fixed(actions);
          const auto r = harness::RunEpisode(task, scene, spec, fixed, 0, ctx.config);
          ++semantic_runs;
          if (r.steps == base.steps && r.progression == base.progression &&
              r.instruction != base.instruction) {
            ++semantic_same;
          } else {
            c.Expect(false, "semantic trace " + label);
          }
        }
      }
      for (uint64_t seed = 0; seed < 8; ++seed) {
        const auto spec = perturb::Sample(f, task, scene, seed, ctx.config.perturb);
        const auto [pscene, ptask] = perturb::ApplyToScene(spec, scene, task);
        ++diffs;
        bool ok = true;
        if (!spec.applicable) {
          ok = ChangedPaths(scene, pscene).empty() && ptask == task;
        } else {
          const std::regex allowed = AllowedPaths(f, target_path);
          for (const auto& p : ChangedPaths(scene, pscene)) ok = ok && std::regex_match(p, allowed);
        }
        if (ok) {
          ++diffs_ok;
        } else {
          c.Expect(false, "scene diff " + label + " seed " + std::to_string(seed));
        }

        const auto again = perturb::Sample(f, task, scene, seed, ctx.config.perturb);
        const auto [qscene, qtask] = perturb::ApplyToScene(again, scene, task);
        ++repro;
        if (again == spec &&
            world::SceneToJson(qscene).dump() == world::SceneToJson(pscene).dump() &&
            qtask == ptask) {
          ++repro_ok;
        } else {
          c.Expect(false, "reproducibility " + label + " seed " + std::to_string(seed));
        }
      }
    }
  }
  c.Note("semantic traces identical " + std::to_string(semantic_same) + "/" +
         std::to_string(semantic_runs));
  c.Note("scene diffs within documented fields " + std::to_string(diffs_ok) + "/" +
         std::to_string(diffs));
  c.Note("sample+apply reproducible " + std::to_string(repro_ok) + "/" + std::to_string(repro));
  return c.Finish();
}

std::map<std::string, std::string> ReadDir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[e.path().filename().string()] = ss.str();
  }
  return files;
}

Outcome DeterminismAndReplay(const Context& ctx) {
  Checks c;
  // The ordering plan plus every factor under a noisy expert.
  EvalPlan factors;
  factors.models = {{"noisy_0.05", "scripted:noisy:0.05"}};
  factors.tasks = ctx.tasks;
  factors.factors.assign(perturb::AllFactors().begin(), perturb::AllFactors().end());
  factors.rollouts_per_cell = 2;
  factors.base_seed = 7;

  int plans_same = 0, files_same = 0, files = 0;
  int replayed = 0, replay_ok = 0;
  for (const auto& [name, plan] : std::vector<std::pair<std::string, EvalPlan>>{
           {"ordering", OrderingPlan(ctx)}, {"factors", factors}}) {
    const fs::path dir_a = ctx.work_dir / (name + "_a");
    const fs::path dir_b = ctx.work_dir / (name + "_b");
    PlanResult a;
    if (name == "ordering" && fs::exists(dir_a)) {
      // Reuse the end-to-end run when it already happened.
      harness::RunOptions o;
      o.workers = ctx.workers;
      a = harness::RunPlan(plan, ctx.config, ScriptedFactory(ctx), o);
    } else {
      a = RunWithRecords(ctx, plan, dir_a);
    }
    const PlanResult b = RunWithRecords(ctx, plan, dir_b);
    if (harness::PlanResultToJson(a).dump() == harness::PlanResultToJson(b).dump() && a == b) {
      ++plans_same;
    } else {
      c.Expect(false, name + " plan rerun differs");
    }
    const auto fa = ReadDir(dir_a), fb = ReadDir(dir_b);
    files += static_cast<int>(fb.size());
    for (const auto& [file, bytes] : fb) {
      const auto it = fa.find(file);
      if (it != fa.end() && it->second == bytes) {
        ++files_same;
      } else {
        c.Expect(false, "record " + file + " differs");
      }
      ++replayed;
      const harness::ReplayReport rep =
          harness::ReplayRecord(harness::RolloutRecordFromJson(Json::parse(bytes)));
      if (rep.ok) {
        ++replay_ok;
      } else {
        c.Expect(false, "replay " + file);
      }
    }
    c.Expect(fa.size() == fb.size(), name + " record count");
  }
  c.Note(std::to_string(plans_same) + "/2 plan reruns bit-identical");
  c.Note(std::to_string(files_same) + "/" + std::to_string(files) + " records byte-identical");
  c.Note(std::to_string(replay_ok) + "/" + std::to_string(replayed) + " records replay exactly");
  return c.Finish();
}

struct Criterion {
  std::string id;
  std::string title;
  double limit_seconds;  // 0 means no runtime bound
  std::function<Outcome(const Context&)> run;
};

int Main(int argc, char** argv) {
  CLI::App app{"Runs the acceptance checks and prints one line per criterion"};
  Context ctx;
  std::string data_dir = REALM_DEFAULT_DATA_DIR;
  std::string work_dir = (fs::temp_directory_path() / "realm_acceptance").string();
  std::vector<std::string> only;
  app.add_option("--data-dir", data_dir, "Data directory");
  app.add_option("--work-dir", work_dir, "Scratch directory for rollout records");
  app.add_option("--workers", ctx.workers, "Worker threads for plan runs")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "Run only these criterion ids");
  CLI11_PARSE(app, argc, argv);

  ctx.data_dir = data_dir;
  ctx.work_dir = work_dir;
  ctx.config = harness::LoadEpisodeConfig(ctx.data_dir);
  ctx.tasks = world::LoadTaskSet(ctx.data_dir / "task_sets.json", "all");
  ctx.home = harness::HomeJoints();
  fs::create_directories(ctx.work_dir);

  const std::vector<Criterion> criteria = {
      {"alignment", "alignment loss self-consistency", 1.0, AlignmentLoss},
      {"sysid", "system identification recovery", 300.0, SysIdRecovery},
      {"cmaes", "CMA-ES sanity", 60.0, CmaEs},
      {"mmrv", "MMRV oracle equivalence", 0.0, Mmrv},
      {"rmsd", "RMSD hand example and zero iff equal", 0.0, Rmsd},
      {"beta", "Beta posterior", 0.0, BetaPosterior},
      {"rubric", "rubric fidelity", 0.0, Rubrics},
      {"ordering", "end-to-end ordering", 900.0, EndToEnd},
      {"perturb", "perturbation semantics", 0.0, PerturbationSemantics},
      {"determinism", "determinism and replay", 0.0, DeterminismAndReplay},
  };
  int failed = 0, ran = 0;
  for (const auto& cr : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), cr.id) == only.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = Num(s, 3) + " s";
    if (cr.limit_seconds > 0) {
      timing += " (limit " + Num(cr.limit_seconds) + " s)";
      if (s >= cr.limit_seconds) {
        o.pass = false;
        timing += " FAILED runtime";
      }
    }
    failed += !o.pass;
    std::printf("%s  %-12s %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", cr.id.c_str(),
                cr.title.c_str(), o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  fs::remove_all(ctx.work_dir);
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace realm

int main(int argc, char** argv) {
  try {
    return realm::Main(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: %s\n", e.what());
    return 2;
  }
}
