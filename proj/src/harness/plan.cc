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

#include "realm/harness/plan.h"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "realm/common/rng.h"
#include "realm/harness/scripted.h"
#include "realm/world/scene_io.h"

namespace realm::harness {

namespace {

constexpr std::array<std::pair<CellStatus, std::string_view>, 3> kCellStatusNames = {{
    {CellStatus::kComplete, "complete"},
    {CellStatus::kNotApplicable, "not_applicable"},
    {CellStatus::kIncomplete, "incomplete"},
}};

std::string Sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '.';
    if (!keep) c = '_';
  }
  return out;
}

struct CellJob {
  size_t model;
  size_t task;
  size_t factor;
};

CellOutcome RunCell(const EvalPlan& plan, const CellJob& job, const world::Scene& scene,
                    const EpisodeConfig& config, Policy* policy, const std::string& policy_error,
                    const RunOptions& options) {
  const ModelSpec& model = plan.models[job.model];
  const world::TaskSpec& task = plan.tasks[job.task];
  const perturb::Factor factor = plan.factors[job.factor];
  CellOutcome cell{model.name, task.id, std::string(perturb::FactorName(factor)),
                   CellStatus::kComplete, "", {}};
  if (!policy) {
    cell.status = CellStatus::kIncomplete;
    cell.message = policy_error;
    return cell;
  }
  int not_applicable = 0;
  for (int i = 0; i < plan.rollouts_per_cell; ++i) {
    const uint64_t seed = RolloutSeed(plan.base_seed, model.name, task.id, factor, i);
    RolloutRecord record;
    try {
      const perturb::PerturbationSpec spec =
          perturb::Sample(factor, task, scene, seed, config.perturb);
      record = RunEpisode(task, scene, spec, *policy, seed, config);
    } catch (const std::exception& e) {
      record.task_id = task.id;
      record.seed = seed;
      record.status = EpisodeStatus::kSetupError;
      record.message = e.what();
    }
    if (options.records_dir && record.status != EpisodeStatus::kNotApplicable) {
      SaveRolloutRecord(record, *options.records_dir /
                                    RecordFileName(model.name, task.id, cell.factor, i));
    }
    RolloutSummary s;
    s.index = i;
    s.seed = seed;
    s.status = record.status;
    s.score = record.progression.score;
    s.success = record.progression.success;
    s.duration_to_success = record.progression.duration_to_success;
    s.message = record.message;
    cell.rollouts.push_back(s);
    if (record.status == EpisodeStatus::kNotApplicable) {
      ++not_applicable;
    } else if (!IsScored(record.status) && cell.status == CellStatus::kComplete) {
      cell.status = CellStatus::kIncomplete;
      cell.message = std::string(StatusName(record.status)) + ": " + record.message;
    }
  }
  if (not_applicable == plan.rollouts_per_cell) {
    cell.status = CellStatus::kNotApplicable;
    cell.message = cell.rollouts.front().message;
  } else if (not_applicable > 0 && cell.status == CellStatus::kComplete) {
    cell.status = CellStatus::kIncomplete;
    cell.message = "factor applies to only some rollouts";
  }
  return cell;
}

}  // namespace

void EvalPlan::Validate() const {
  if (models.empty() || tasks.empty() || factors.empty()) {
    throw std::invalid_argument("plan needs at least one model, task and factor");
  }
  if (rollouts_per_cell < 1) throw std::invalid_argument("rollouts_per_cell must be >= 1");
  std::set<std::string> names;
  for (const auto& m : models) {
    if (m.name.empty() || !names.insert(m.name).second) {
      throw std::invalid_argument("model names must be unique and non-empty");
    }
  }
  std::set<std::string> ids;
  for (const auto& t : tasks) {
    if (!ids.insert(t.id).second) throw std::invalid_argument("duplicate task '" + t.id + "'");
  }
  std::set<perturb::Factor> fs(factors.begin(), factors.end());
  if (fs.size() != factors.size()) throw std::invalid_argument("duplicate factor in plan");
}

uint64_t RolloutSeed(uint64_t base_seed, const std::string& model, const std::string& task,
                     perturb::Factor factor, int index) {
  uint64_t h = HashCombine(base_seed, HashString(model));
  h = HashCombine(h, HashString(task));
  h = HashCombine(h, HashString(perturb::FactorName(factor)));
  return HashCombine(h, static_cast<uint64_t>(index));
}

std::unique_ptr<Policy> MakePolicy(const ModelSpec& model, const arm::ArmParams& params,
                                   const RemoteOptions& remote) {
  constexpr std::string_view kScripted = "scripted:";
  if (model.policy.rfind(kScripted, 0) == 0) {
    return MakeScriptedPolicy(model.policy.substr(kScripted.size()), params);
  }
  if (model.policy.rfind("tcp://", 0) == 0) {
    return std::make_unique<RemotePolicy>(model.policy, remote);
  }
  throw std::invalid_argument("policy must be scripted:<name> or tcp://host:port, got '" +
                              model.policy + "'");
}

std::string_view CellStatusName(CellStatus status) {
  for (const auto& [s, n] : kCellStatusNames) {
    if (s == status) return n;
  }
  throw std::invalid_argument("unknown cell status");
}

CellStatus ParseCellStatus(std::string_view name) {
  for (const auto& [s, n] : kCellStatusNames) {
    if (n == name) return s;
  }
  throw std::invalid_argument("unknown cell status '" + std::string(name) + "'");
}

std::string RecordFileName(const std::string& model, const std::string& task,
                           const std::string& factor, int index) {
  char idx[16];
  std::snprintf(idx, sizeof(idx), "%03d", index);
  return Sanitize(model) + "__" + Sanitize(task) + "__" + Sanitize(factor) + "__" + idx + ".json";
}

Json PlanResultToJson(const PlanResult& r) {
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    Json rollouts = Json::array();
    for (const auto& s : c.rollouts) {
      rollouts.push_back({{"index", s.index},
                          {"seed", s.seed},
                          {"status", StatusName(s.status)},
                          {"score", s.score},
                          {"success", s.success},
                          {"duration_to_success", s.duration_to_success
                                                      ? Json(*s.duration_to_success)
                                                      : Json(nullptr)},
                          {"message", s.message}});
    }
    cells.push_back({{"model", c.model},
                     {"task", c.task},
                     {"factor", c.factor},
                     {"status", CellStatusName(c.status)},
                     {"message", c.message},
                     {"rollouts", rollouts}});
  }
  return {{"cells", cells}};
}

PlanResult PlanResultFromJson(const Json& j) {
  PlanResult r;
  for (const auto& c : j.at("cells")) {
    CellOutcome cell;
    cell.model = c.at("model").get<std::string>();
    cell.task = c.at("task").get<std::string>();
    cell.factor = c.at("factor").get<std::string>();
    cell.status = ParseCellStatus(c.at("status").get<std::string>());
    cell.message = c.at("message").get<std::string>();
    for (const auto& s : c.at("rollouts")) {
      RolloutSummary rs;
      rs.index = s.at("index").get<int>();
      rs.seed = s.at("seed").get<uint64_t>();
      rs.status = ParseStatus(s.at("status").get<std::string>());
      rs.score = s.at("score").get<double>();
      rs.success = s.at("success").get<bool>();
      if (!s.at("duration_to_success").is_null()) {
        rs.duration_to_success = s.at("duration_to_success").get<double>();
      }
      rs.message = s.at("message").get<std::string>();
      cell.rollouts.push_back(rs);
    }
    if (cell.status == CellStatus::kComplete) {
      for (const auto& s : cell.rollouts) r.table.Add(cell.model, cell.task, cell.factor, s.score, s.success);
    }
    r.cells.push_back(std::move(cell));
  }
  return r;
}

PlanResult RunPlan(const EvalPlan& plan, const EpisodeConfig& config,
                   const ModelPolicyFactory& factory, const RunOptions& options) {
  plan.Validate();
  if (options.workers < 1) throw std::invalid_argument("workers must be >= 1");

  std::map<std::string, world::Scene> scenes;
  for (const auto& t : plan.tasks) {
    const std::string key = t.scene_path.string();
    if (!scenes.count(key)) scenes.emplace(key, world::LoadScene(t.scene_path));
  }
  // Every endpoint must be reachable at the start.
  for (const auto& m : plan.models) factory(m);

  std::vector<CellJob> jobs;
  for (size_t m = 0; m < plan.models.size(); ++m) {
    for (size_t t = 0; t < plan.tasks.size(); ++t) {
      for (size_t f = 0; f < plan.factors.size(); ++f) jobs.push_back({m, t, f});
    }
  }
  std::vector<size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  if (options.shuffle_seed) {
    CounterRng rng(*options.shuffle_seed);
    for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.UniformInt(i)]);
  }

  std::vector<CellOutcome> outcomes(jobs.size());
  std::atomic<size_t> next{0};
  std::mutex callback_mutex;
  auto worker = [&]() {
    std::vector<std::unique_ptr<Policy>> policies(plan.models.size());
    std::vector<std::string> errors(plan.models.size());
    for (;;) {
      const size_t k = next.fetch_add(1);
      if (k >= order.size()) return;
      const CellJob& job = jobs[order[k]];
      if (!policies[job.model] && errors[job.model].empty()) {
        try {
          policies[job.model] = factory(plan.models[job.model]);
        } catch (const std::exception& e) {
          errors[job.model] = std::string("cannot create policy: ") + e.what();
        }
      }
      const world::Scene& scene = scenes.at(plan.tasks[job.task].scene_path.string());
      outcomes[order[k]] = RunCell(plan, job, scene, config, policies[job.model].get(),
                                   errors[job.model], options);
      if (options.on_cell) {
        std::lock_guard<std::mutex> lock(callback_mutex);
        options.on_cell(outcomes[order[k]]);
      }
      // A policy that failed creation may be retried for the next cell.
      errors[job.model].clear();
    }
  };
  const int n = std::min<int>(options.workers, static_cast<int>(jobs.size()));
  std::vector<std::thread> threads;
  for (int i = 1; i < n; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  PlanResult result;
  for (CellOutcome& c : outcomes) {
    if (c.status == CellStatus::kComplete) {
      for (const auto& s : c.rollouts) result.table.Add(c.model, c.task, c.factor, s.score, s.success);
    }
    result.cells.push_back(std::move(c));
  }
  return result;
}

}  // namespace realm::harness
