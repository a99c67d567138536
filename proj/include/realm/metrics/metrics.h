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

#ifndef REALM_METRICS_METRICS_H_
#define REALM_METRICS_METRICS_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace realm::metrics {

inline constexpr const char* kDefaultFactor = "DEFAULT";

struct Cell {
  double mean = 0.0;  // mean progression over the cell's rollouts
  int count = 0;
  int successes = 0;

  bool operator==(const Cell&) const = default;
};

// Mean progression r[m][t][p] with per-cell rollout counts.
class ProgressionTable {
 public:
  using Key = std::tuple<std::string, std::string, std::string>;  // model, task, factor

  void Set(const std::string& model, const std::string& task, const std::string& factor,
           const Cell& cell);
  // Accumulates one rollout into a cell.
  void Add(const std::string& model, const std::string& task, const std::string& factor,
           double progression, bool success);

  const Cell* Find(const std::string& model, const std::string& task,
                   const std::string& factor) const;
  const Cell& At(const std::string& model, const std::string& task,
                 const std::string& factor) const;

  std::vector<std::string> Models() const;
  std::vector<std::string> Tasks() const;
  std::vector<std::string> Factors() const;
  const std::map<Key, Cell>& cells() const { return cells_; }

  bool operator==(const ProgressionTable&) const = default;

 private:
  std::map<Key, Cell> cells_;
};

// sqrt of the mean over all (model, task) of (r_p - r_default)^2. Throws
// std::invalid_argument listing any missing cells.
double Rmsd(const ProgressionTable& table, const std::string& factor);

// Per-model RMSD over tasks divided by the model's mean default progression.
// Empty when that mean is zero.
std::optional<double> NormalizedRmsd(const ProgressionTable& table, const std::string& factor,
                                     const std::string& model);

// Population standard deviation over tasks of |r_p - r_default| for one model.
double EffectDeviation(const ProgressionTable& table, const std::string& factor,
                       const std::string& model);

// Mean over policies of the largest rank violation
// |real_i - real_j| * [(sim_i < sim_j) != (real_i < real_j)].
double Mmrv(std::span<const double> real, std::span<const double> sim);

// Sample correlation; empty when either input has zero variance.
std::optional<double> Pearson(std::span<const double> x, std::span<const double> y);

// Two-sided p-value of the correlation t statistic with n - 2 degrees of
// freedom. Empty on degenerate variance.
std::optional<double> CorrelationPValue(std::span<const double> x, std::span<const double> y);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double RegularizedIncompleteBeta(double a, double b, double x);
// Student t CDF with `df` degrees of freedom.
double StudentTCdf(double t, double df);
// Inverse of I_x(a, b) in x by bisection.
double BetaQuantile(double a, double b, double p);

struct BetaPosterior {
  double alpha = 1.0;
  double beta = 1.0;
  double mean = 0.5;
  double lower = 0.0;  // 2.5% quantile
  double upper = 1.0;  // 97.5% quantile
};

// Uniform prior: Beta(1 + s, 1 + n - s).
BetaPosterior SuccessPosterior(int successes, int trials);

}  // namespace realm::metrics

#endif  // REALM_METRICS_METRICS_H_
