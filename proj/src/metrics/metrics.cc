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

#include "realm/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace realm::metrics {
namespace {

std::vector<std::string> Column(const std::map<ProgressionTable::Key, Cell>& cells, int which) {
  std::set<std::string> out;
  for (const auto& [key, cell] : cells) {
    out.insert(which == 0 ? std::get<0>(key) : which == 1 ? std::get<1>(key) : std::get<2>(key));
  }
  return {out.begin(), out.end()};
}

// Differences r_p - r_default over tasks for the given models.
std::vector<double> Differences(const ProgressionTable& table, const std::string& factor,
                                const std::vector<std::string>& models) {
  std::vector<double> diffs;
  std::string missing;
  for (const auto& m : models) {
    for (const auto& t : table.Tasks()) {
      const Cell* p = table.Find(m, t, factor);
      const Cell* d = table.Find(m, t, kDefaultFactor);
      if (!p) missing += " (" + m + ", " + t + ", " + factor + ")";
      if (!d) missing += " (" + m + ", " + t + ", " + kDefaultFactor + ")";
      if (p && d) diffs.push_back(p->mean - d->mean);
    }
  }
  if (!missing.empty()) throw std::invalid_argument("missing table cells:" + missing);
  if (diffs.empty()) throw std::invalid_argument("empty progression table");
  return diffs;
}

double RootMeanSquare(const std::vector<double>& v) {
  double s = 0.0;
  for (double d : v) s += d * d;
  return std::sqrt(s / static_cast<double>(v.size()));
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double BetaContinuedFraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

void ProgressionTable::Set(const std::string& model, const std::string& task,
                           const std::string& factor, const Cell& cell) {
  cells_[{model, task, factor}] = cell;
}

void ProgressionTable::Add(const std::string& model, const std::string& task,
                           const std::string& factor, double progression, bool success) {
  Cell& c = cells_[{model, task, factor}];
  c.mean += (progression - c.mean) / (c.count + 1);
  ++c.count;
  c.successes += success ? 1 : 0;
}

const Cell* ProgressionTable::Find(const std::string& model, const std::string& task,
                                   const std::string& factor) const {
  const auto it = cells_.find({model, task, factor});
  return it == cells_.end() ? nullptr : &it->second;
}

const Cell& ProgressionTable::At(const std::string& model, const std::string& task,
                                 const std::string& factor) const {
  const Cell* c = Find(model, task, factor);
  if (!c) throw std::out_of_range("no cell (" + model + ", " + task + ", " + factor + ")");
  return *c;
}

std::vector<std::string> ProgressionTable::Models() const { return Column(cells_, 0); }
std::vector<std::string> ProgressionTable::Tasks() const { return Column(cells_, 1); }
std::vector<std::string> ProgressionTable::Factors() const { return Column(cells_, 2); }

double Rmsd(const ProgressionTable& table, const std::string& factor) {
  return RootMeanSquare(Differences(table, factor, table.Models()));
}

std::optional<double> NormalizedRmsd(const ProgressionTable& table, const std::string& factor,
                                     const std::string& model) {
  const double rmsd = RootMeanSquare(Differences(table, factor, {model}));
  double mean_default = 0.0;
  const auto tasks = table.Tasks();
  for (const auto& t : tasks) mean_default += table.At(model, t, kDefaultFactor).mean;
  mean_default /= static_cast<double>(tasks.size());
  if (mean_default == 0.0) return std::nullopt;
  return rmsd / mean_default;
}

double EffectDeviation(const ProgressionTable& table, const std::string& factor,
                       const std::string& model) {
  std::vector<double> d = Differences(table, factor, {model});
  double mean = 0.0;
  for (double& v : d) mean += (v = std::abs(v));
  mean /= static_cast<double>(d.size());
  double var = 0.0;
  for (double v : d) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(d.size()));
}

double Mmrv(std::span<const double> real, std::span<const double> sim) {
  if (real.size() != sim.size()) throw std::invalid_argument("Mmrv: length mismatch");
  if (real.size() < 2) throw std::invalid_argument("Mmrv: need at least two policies");
  const size_t n = real.size();
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double worst = 0.0;
    for (size_t j = 0; j < n; ++j) {
      if (real[i] == real[j] || sim[i] == sim[j]) continue;
      if ((sim[i] < sim[j]) != (real[i] < real[j])) {
        worst = std::max(worst, std::abs(real[i] - real[j]));
      }
    }
    total += worst;
  }
  return total / static_cast<double>(n);
}

std::optional<double> Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("Pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("Pearson: need at least two samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> CorrelationPValue(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 3) throw std::invalid_argument("CorrelationPValue: need at least three samples");
  const std::optional<double> r = Pearson(x, y);
  if (!r) return std::nullopt;
  const double df = static_cast<double>(x.size()) - 2.0;
  const double r2 = *r * *r;
  if (r2 >= 1.0) return 0.0;
  const double t2 = df * r2 / (1.0 - r2);
  // Two-sided tail of Student t: I_{df / (df + t^2)}(df / 2, 1 / 2).
  return RegularizedIncompleteBeta(0.5 * df, 0.5, df / (df + t2));
}

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * BetaContinuedFraction(a, b, x) / a;
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTCdf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("StudentTCdf: df must be > 0");
  const double tail = 0.5 * RegularizedIncompleteBeta(0.5 * df, 0.5, df / (df + t * t));
  return t >= 0.0 ? 1.0 - tail : tail;
}

double BetaQuantile(double a, double b, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (RegularizedIncompleteBeta(a, b, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BetaPosterior SuccessPosterior(int successes, int trials) {
  if (successes < 0 || trials < successes) {
    throw std::invalid_argument("SuccessPosterior: need 0 <= successes <= trials");
  }
  BetaPosterior p;
  p.alpha = 1.0 + successes;
  p.beta = 1.0 + trials - successes;
  p.mean = p.alpha / (p.alpha + p.beta);
  p.lower = BetaQuantile(p.alpha, p.beta, 0.025);
  p.upper = BetaQuantile(p.alpha, p.beta, 0.975);
  return p;
}

}  // namespace realm::metrics
