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

#ifndef REALM_HARNESS_REPORT_H_
#define REALM_HARNESS_REPORT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "realm/harness/plan.h"
#include "realm/metrics/metrics.h"

namespace realm::harness {

struct FactorRank {
  std::string factor;
  std::optional<double> mean_normalized_rmsd;  // over models where defined
  double rmsd = 0.0;                           // pooled over models and tasks
  double mean_effect_deviation = 0.0;
  int tasks = 0;  // tasks with complete cells for every model

  bool operator==(const FactorRank&) const = default;
};

// Cells of `factor` and DEFAULT restricted to tasks where both are present
// for every model.
metrics::ProgressionTable PairedTable(const metrics::ProgressionTable& table,
                                      const std::string& factor);

// Every non-DEFAULT factor of the table, by descending mean normalized RMSD;
// factors without a defined value come last; ties break by factor id.
std::vector<FactorRank> RankFactors(const metrics::ProgressionTable& table);

// Linear-interpolation quantile of a non-empty sample (type 7).
double Quantile(std::vector<double> values, double p);

struct RealResult {
  std::string model;
  std::string task;
  double progression = 0.0;
};

// CSV with header "model,task,progression".
std::vector<RealResult> LoadRealResults(const std::filesystem::path& path);

struct RealComparison {
  int pairs = 0;
  std::optional<double> pearson;
  std::optional<double> p_value;
  std::optional<double> mmrv;  // over per-model mean progressions
  double mean_task_mmrv = 0.0; // mean over tasks with >= 2 models
  int tasks = 0;
};

// Pairs real results with DEFAULT cells of the table.
RealComparison CompareWithReal(const metrics::ProgressionTable& table,
                               const std::vector<RealResult>& real);

// Writes report.json, radar.csv, factor_ranking.csv, posteriors.csv,
// time_to_completion.csv, radar_<model>.svg and, with real results,
// real_comparison.csv. Output is a pure function of the inputs.
void EmitReport(const PlanResult& result, const std::filesystem::path& out_dir,
                const std::optional<std::vector<RealResult>>& real = std::nullopt);

}  // namespace realm::harness

#endif  // REALM_HARNESS_REPORT_H_
