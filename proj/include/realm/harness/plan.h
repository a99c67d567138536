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

#ifndef REALM_HARNESS_PLAN_H_
#define REALM_HARNESS_PLAN_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "realm/harness/episode.h"
#include "realm/harness/policy.h"
#include "realm/harness/remote.h"
#include "realm/metrics/metrics.h"
#include "realm/perturb/perturb.h"

namespace realm::harness {

struct ModelSpec {
  std::string name;    // row label in the progression table
  std::string policy;  // "scripted:<name>" or "tcp://host:port"
};

struct EvalPlan {
  std::vector<ModelSpec> models;
  std::vector<world::TaskSpec> tasks;
  std::vector<perturb::Factor> factors;
  int rollouts_per_cell = 25;
  uint64_t base_seed = 0;

  // Throws std::invalid_argument on empty lists, duplicate names or
  // rollouts_per_cell < 1.
  void Validate() const;
  size_t NumRollouts() const {
    return models.size() * tasks.size() * factors.size() * static_cast<size_t>(rollouts_per_cell);
  }
};

// Stable per-rollout seed, independent of execution order.
uint64_t RolloutSeed(uint64_t base_seed, const std::string& model, const std::string& task,
                     perturb::Factor factor, int index);

// Builds a policy for a model spec. Remote policies connect immediately.
std::unique_ptr<Policy> MakePolicy(const ModelSpec& model, const arm::ArmParams& params,
                                   const RemoteOptions& remote);

using ModelPolicyFactory = std::function<std::unique_ptr<Policy>(const ModelSpec&)>;

struct RolloutSummary {
  int index = 0;
  uint64_t seed = 0;
  EpisodeStatus status = EpisodeStatus::kMaxSteps;
  double score = 0.0;
  bool success = false;
  std::optional<double> duration_to_success;
  std::string message;

  bool operator==(const RolloutSummary&) const = default;
};

enum class CellStatus { kComplete, kNotApplicable, kIncomplete };
std::string_view CellStatusName(CellStatus status);
CellStatus ParseCellStatus(std::string_view name);

struct CellOutcome {
  std::string model;
  std::string task;
  std::string factor;
  CellStatus status = CellStatus::kComplete;
  std::string message;
  std::vector<RolloutSummary> rollouts;

  bool operator==(const CellOutcome&) const = default;
};

struct PlanResult {
  metrics::ProgressionTable table;  // complete cells only
  std::vector<CellOutcome> cells;   // plan order: model, task, factor

  bool operator==(const PlanResult&) const = default;
};

Json PlanResultToJson(const PlanResult& r);
PlanResult PlanResultFromJson(const Json& j);

struct RunOptions {
  int workers = 1;
  // Written as <dir>/<model>__<task>__<factor>__<index>.json when set.
  std::optional<std::filesystem::path> records_dir;
  // Permutes the order in which cells are executed (testing aid).
  std::optional<uint64_t> shuffle_seed;
  // Called after each finished cell from the worker thread, under a lock.
  std::function<void(const CellOutcome&)> on_cell;
};

// Executes every cell on a pool of workers. Each worker owns its policies
// (one per model, created on first use); results are reduced in plan order
// after all workers finish. A cell whose rollouts fail with connection,
// protocol, policy or setup errors is marked incomplete and left out of the
// table; a cell whose factor does not apply to the task is marked
// not applicable.
PlanResult RunPlan(const EvalPlan& plan, const EpisodeConfig& config,
                   const ModelPolicyFactory& factory, const RunOptions& options = {});

// Record file name for one rollout.
std::string RecordFileName(const std::string& model, const std::string& task,
                           const std::string& factor, int index);

}  // namespace realm::harness

#endif  // REALM_HARNESS_PLAN_H_
