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

#include "realm/harness/report.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace realm::harness {

using metrics::Cell;
using metrics::kDefaultFactor;
using metrics::ProgressionTable;

namespace {

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string Fmt(const std::optional<double>& v) { return v ? Fmt(*v) : ""; }

Json OptJson(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// Factors in taxonomy order; unknown names sort after, alphabetically.
std::vector<std::string> OrderedFactors(const std::vector<std::string>& names) {
  auto rank = [](const std::string& n) -> size_t {
    try {
      const perturb::Factor f = perturb::ParseFactor(n);
      const auto& all = perturb::AllFactors();
      return static_cast<size_t>(std::find(all.begin(), all.end(), f) - all.begin());
    } catch (const std::exception&) {
      return perturb::AllFactors().size();
    }
  };
  std::vector<std::string> out = names;
  std::stable_sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
    const size_t ra = rank(a), rb = rank(b);
    return ra != rb ? ra < rb : a < b;
  });
  return out;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// Mean progression of a model under a factor over tasks with complete cells.
std::optional<std::pair<double, int>> FactorMean(const ProgressionTable& t, const std::string& model,
                                                 const std::string& factor) {
  double sum = 0.0;
  int n = 0;
  for (const auto& task : t.Tasks()) {
    if (const Cell* c = t.Find(model, task, factor)) {
      sum += c->mean;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return std::make_pair(sum / n, n);
}

std::string RadarSvg(const std::string& model, const std::vector<std::pair<std::string, double>>& axes) {
  constexpr double kSize = 480.0, kCenter = 240.0, kRadius = 170.0;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
    << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kCenter << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">"
    << model << "</text>\n";
  const size_t n = axes.size();
  auto point = [&](size_t i, double r) {
    const double a = -std::numbers::pi / 2 + 2 * std::numbers::pi * static_cast<double>(i) /
                                                 static_cast<double>(std::max<size_t>(n, 1));
    return std::make_pair(kCenter + r * kRadius * std::cos(a), kCenter + r * kRadius * std::sin(a));
  };
  for (double ring : {0.25, 0.5, 0.75, 1.0}) {
    s << "<circle cx=\"" << kCenter << "\" cy=\"" << kCenter << "\" r=\"" << Fmt(ring * kRadius)
      << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
  }
  for (size_t i = 0; i < n; ++i) {
    const auto [x, y] = point(i, 1.0);
    const auto [lx, ly] = point(i, 1.12);
    s << "<line x1=\"" << kCenter << "\" y1=\"" << kCenter << "\" x2=\"" << Fmt(x) << "\" y2=\""
      << Fmt(y) << "\" stroke=\"#999\"/>\n";
    s << "<text x=\"" << Fmt(lx) << "\" y=\"" << Fmt(ly)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << axes[i].first
      << "</text>\n";
  }
  if (n > 0) {
    s << "<polygon fill=\"#3b7dd8\" fill-opacity=\"0.3\" stroke=\"#3b7dd8\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < n; ++i) {
      const auto [x, y] = point(i, std::clamp(axes[i].second, 0.0, 1.0));
      s << (i ? " " : "") << Fmt(x) << ',' << Fmt(y);
    }
    s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

ProgressionTable PairedTable(const ProgressionTable& table, const std::string& factor) {
  ProgressionTable out;
  const auto models = table.Models();
  for (const auto& task : table.Tasks()) {
    bool ok = true;
    for (const auto& m : models) {
      ok = ok && table.Find(m, task, factor) && table.Find(m, task, kDefaultFactor);
    }
    if (!ok) continue;
    for (const auto& m : models) {
      out.Set(m, task, factor, table.At(m, task, factor));
      out.Set(m, task, kDefaultFactor, table.At(m, task, kDefaultFactor));
    }
  }
  return out;
}

std::vector<FactorRank> RankFactors(const ProgressionTable& table) {
  std::vector<FactorRank> ranks;
  for (const auto& factor : table.Factors()) {
    if (factor == kDefaultFactor) continue;
    const ProgressionTable paired = PairedTable(table, factor);
    if (paired.cells().empty()) continue;
    FactorRank r;
    r.factor = factor;
    r.tasks = static_cast<int>(paired.Tasks().size());
    r.rmsd = metrics::Rmsd(paired, factor);
    double sum = 0.0, dev = 0.0;
    int defined = 0;
    const auto models = paired.Models();
    for (const auto& m : models) {
      if (const auto v = metrics::NormalizedRmsd(paired, factor, m)) {
        sum += *v;
        ++defined;
      }
      dev += metrics::EffectDeviation(paired, factor, m);
    }
    if (defined > 0) r.mean_normalized_rmsd = sum / defined;
    r.mean_effect_deviation = dev / static_cast<double>(models.size());
    ranks.push_back(r);
  }
  std::sort(ranks.begin(), ranks.end(), [](const FactorRank& a, const FactorRank& b) {
    if (a.mean_normalized_rmsd.has_value() != b.mean_normalized_rmsd.has_value()) {
      return a.mean_normalized_rmsd.has_value();
    }
    if (a.mean_normalized_rmsd && *a.mean_normalized_rmsd != *b.mean_normalized_rmsd) {
      return *a.mean_normalized_rmsd > *b.mean_normalized_rmsd;
    }
    return a.factor < b.factor;
  });
  return ranks;
}

double Quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("Quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<RealResult> LoadRealResults(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "model,task,progression") {
    throw std::invalid_argument(path.string() + ": header must be 'model,task,progression'");
  }
  std::vector<RealResult> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    RealResult r;
    std::string value;
    if (!std::getline(ss, r.model, ',') || !std::getline(ss, r.task, ',') ||
        !std::getline(ss, value)) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": expected three fields");
    }
    size_t used = 0;
    try {
      r.progression = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !(r.progression >= 0.0 && r.progression <= 1.0)) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": progression must be a number in [0, 1]");
    }
    out.push_back(r);
  }
  return out;
}

RealComparison CompareWithReal(const ProgressionTable& table, const std::vector<RealResult>& real) {
  RealComparison cmp;
  std::vector<double> xs, ys;
  std::map<std::string, std::pair<double, int>> real_by_model, sim_by_model;
  std::map<std::string, std::vector<std::pair<double, double>>> by_task;
  for (const auto& r : real) {
    const Cell* c = table.Find(r.model, r.task, kDefaultFactor);
    if (!c) continue;
    xs.push_back(r.progression);
    ys.push_back(c->mean);
    auto& rm = real_by_model[r.model];
    rm.first += r.progression;
    ++rm.second;
    auto& sm = sim_by_model[r.model];
    sm.first += c->mean;
    ++sm.second;
    by_task[r.task].emplace_back(r.progression, c->mean);
  }
  cmp.pairs = static_cast<int>(xs.size());
  if (xs.size() >= 2) cmp.pearson = metrics::Pearson(xs, ys);
  if (xs.size() >= 3) cmp.p_value = metrics::CorrelationPValue(xs, ys);
  if (real_by_model.size() >= 2) {
    std::vector<double> rm, sm;
    for (const auto& [m, v] : real_by_model) {
      rm.push_back(v.first / v.second);
      sm.push_back(sim_by_model[m].first / sim_by_model[m].second);
    }
    cmp.mmrv = metrics::Mmrv(rm, sm);
  }
  double sum = 0.0;
  for (const auto& [task, pairs] : by_task) {
    if (pairs.size() < 2) continue;
    std::vector<double> r, s;
    for (const auto& [a, b] : pairs) {
      r.push_back(a);
      s.push_back(b);
    }
    sum += metrics::Mmrv(r, s);
    ++cmp.tasks;
  }
  if (cmp.tasks > 0) cmp.mean_task_mmrv = sum / cmp.tasks;
  return cmp;
}

void EmitReport(const PlanResult& result, const std::filesystem::path& out_dir,
                const std::optional<std::vector<RealResult>>& real) {
  std::filesystem::create_directories(out_dir);
  const ProgressionTable& table = result.table;
  const auto models = table.Models();
  const auto factors = OrderedFactors(table.Factors());

  // Radar: per-factor means per model.
  std::string radar = "model,factor,mean_progression,tasks\n";
  Json radar_json = Json::array();
  for (const auto& m : models) {
    std::vector<std::pair<std::string, double>> axes;
    for (const auto& f : factors) {
      const auto mean = FactorMean(table, m, f);
      if (!mean) continue;
      radar += m + "," + f + "," + Fmt(mean->first) + "," + std::to_string(mean->second) + "\n";
      radar_json.push_back({{"model", m}, {"factor", f}, {"mean_progression", mean->first},
                            {"tasks", mean->second}});
      axes.emplace_back(f, mean->first);
    }
    std::string file = m;
    for (char& c : file) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
    }
    WriteFile(out_dir / ("radar_" + file + ".svg"), RadarSvg(m, axes));
  }
  WriteFile(out_dir / "radar.csv", radar);

  // Factor ranking.
  const auto ranks = RankFactors(table);
  std::string ranking = "rank,factor,mean_normalized_rmsd,rmsd,mean_effect_deviation,tasks\n";
  Json ranking_json = Json::array();
  for (size_t i = 0; i < ranks.size(); ++i) {
    const auto& r = ranks[i];
    ranking += std::to_string(i + 1) + "," + r.factor + "," + Fmt(r.mean_normalized_rmsd) + "," +
               Fmt(r.rmsd) + "," + Fmt(r.mean_effect_deviation) + "," + std::to_string(r.tasks) +
               "\n";
    ranking_json.push_back({{"rank", i + 1},
                            {"factor", r.factor},
                            {"mean_normalized_rmsd", OptJson(r.mean_normalized_rmsd)},
                            {"rmsd", r.rmsd},
                            {"mean_effect_deviation", r.mean_effect_deviation},
                            {"tasks", r.tasks}});
  }
  WriteFile(out_dir / "factor_ranking.csv", ranking);

  // Posteriors, time to completion and the cell listing.
  std::string posteriors = "model,task,factor,successes,trials,alpha,beta,mean,lower,upper\n";
  std::string ttc = "model,task,factor,successes,q25_s,median_s,q75_s\n";
  Json cells = Json::array();
  Json missing = Json::array();
  Json not_applicable = Json::array();
  for (const auto& c : result.cells) {
    const std::string key = c.model + "," + c.task + "," + c.factor;
    if (c.status == CellStatus::kNotApplicable) {
      not_applicable.push_back({{"model", c.model}, {"task", c.task}, {"factor", c.factor},
                                {"reason", c.message}});
      continue;
    }
    if (c.status == CellStatus::kIncomplete) {
      missing.push_back({{"model", c.model}, {"task", c.task}, {"factor", c.factor},
                         {"reason", c.message}});
      continue;
    }
    const Cell& cell = table.At(c.model, c.task, c.factor);
    const metrics::BetaPosterior post = metrics::SuccessPosterior(cell.successes, cell.count);
    posteriors += key + "," + std::to_string(cell.successes) + "," + std::to_string(cell.count) +
                  "," + Fmt(post.alpha) + "," + Fmt(post.beta) + "," + Fmt(post.mean) + "," +
                  Fmt(post.lower) + "," + Fmt(post.upper) + "\n";
    std::vector<double> durations;
    for (const auto& r : c.rollouts) {
      if (r.duration_to_success) durations.push_back(*r.duration_to_success);
    }
    Json ttc_json = nullptr;
    ttc += key + "," + std::to_string(durations.size()) + ",";
    if (durations.empty()) {
      ttc += ",,\n";
    } else {
      const double q25 = Quantile(durations, 0.25), q50 = Quantile(durations, 0.5),
                   q75 = Quantile(durations, 0.75);
      ttc += Fmt(q25) + "," + Fmt(q50) + "," + Fmt(q75) + "\n";
      ttc_json = {{"q25_s", q25}, {"median_s", q50}, {"q75_s", q75}};
    }
    cells.push_back({{"model", c.model},
                     {"task", c.task},
                     {"factor", c.factor},
                     {"mean_progression", cell.mean},
                     {"rollouts", cell.count},
                     {"successes", cell.successes},
                     {"posterior",
                      {{"alpha", post.alpha},
                       {"beta", post.beta},
                       {"mean", post.mean},
                       {"lower", post.lower},
                       {"upper", post.upper}}},
                     {"time_to_completion", ttc_json}});
  }
  WriteFile(out_dir / "posteriors.csv", posteriors);
  WriteFile(out_dir / "time_to_completion.csv", ttc);

  Json report = {{"models", models},
                 {"tasks", table.Tasks()},
                 {"factors", factors},
                 {"cells", cells},
                 {"radar", radar_json},
                 {"factor_ranking", ranking_json},
                 {"missing_cells", missing},
                 {"not_applicable_cells", not_applicable},
                 {"definitions",
                  {{"normalized_rmsd", "per-model RMSD over tasks divided by that model's mean "
                                       "DEFAULT progression; averaged over models"},
                   {"effect_deviation", "population standard deviation over tasks of "
                                        "|perturbed - default| progression"},
                   {"posterior", "Beta(1 + successes, 1 + failures), equal-tailed 95% interval"}}}};

  if (real) {
    const RealComparison cmp = CompareWithReal(table, *real);
    std::string csv = "pairs,pearson_r,p_value,mmrv_model_means,mean_task_mmrv,tasks\n";
    csv += std::to_string(cmp.pairs) + "," + Fmt(cmp.pearson) + "," + Fmt(cmp.p_value) + "," +
           Fmt(cmp.mmrv) + "," + Fmt(cmp.mean_task_mmrv) + "," + std::to_string(cmp.tasks) + "\n";
    WriteFile(out_dir / "real_comparison.csv", csv);
    report["real_comparison"] = {{"pairs", cmp.pairs},
                                 {"pearson_r", OptJson(cmp.pearson)},
                                 {"p_value", OptJson(cmp.p_value)},
                                 {"mmrv_model_means", OptJson(cmp.mmrv)},
                                 {"mean_task_mmrv", cmp.mean_task_mmrv},
                                 {"tasks", cmp.tasks}};
  }
  WriteFile(out_dir / "report.json", report.dump(2) + "\n");
}

}  // namespace realm::harness
