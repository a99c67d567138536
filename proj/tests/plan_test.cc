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

#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>
#include "harness_test_util.h"
#include "realm/harness/report.h"

namespace realm::harness {
namespace {

using metrics::Cell;
using metrics::ProgressionTable;
using perturb::Factor;
using test_util::Config;
using test_util::Task;

namespace fs = std::filesystem;

ModelPolicyFactory Scripted() {
  return [](const ModelSpec& m) { return MakePolicy(m, Config().params, RemoteOptions{}); };
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("realm_plan_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EvalPlan SmallPlan() {
  EvalPlan plan;
  plan.models = {{"expert", "scripted:expert"}, {"hold", "scripted:hold"}};
  plan.tasks = {Task("pick_can"), Task("push_button")};
  plan.factors = {Factor::kDefault, Factor::kVLight};
  plan.rollouts_per_cell = 2;
  plan.base_seed = 11;
  return plan;
}

TEST(Plan, CellsAreCountedInPlanOrder) {
  EvalPlan plan;
  plan.models = {{"expert", "scripted:expert"}};
  plan.tasks = {Task("pick_can"), Task("push_button")};
  plan.factors = {Factor::kDefault};
  plan.rollouts_per_cell = 3;
  const PlanResult r = RunPlan(plan, Config(), Scripted());
  ASSERT_EQ(r.cells.size(), 2u);
  EXPECT_EQ(r.cells[0].task, "pick_can");
  EXPECT_EQ(r.cells[1].task, "push_button");
  for (const auto& c : r.cells) {
    EXPECT_EQ(c.status, CellStatus::kComplete);
    EXPECT_EQ(c.rollouts.size(), 3u);
  }
  const Cell& cell = r.table.At("expert", "pick_can", "DEFAULT");
  EXPECT_EQ(cell.count, 3);
  EXPECT_EQ(cell.successes, 3);
  EXPECT_DOUBLE_EQ(cell.mean, 1.0);
}

TEST(Plan, SeedsDependOnEveryCoordinate) {
  std::set<uint64_t> seeds;
  for (const char* m : {"a", "b"}) {
    for (const char* t : {"x", "y"}) {
      for (Factor f : {Factor::kDefault, Factor::kVAug}) {
        for (int i = 0; i < 3; ++i) seeds.insert(RolloutSeed(5, m, t, f, i));
      }
    }
  }
  EXPECT_EQ(seeds.size(), 24u);
  EXPECT_NE(RolloutSeed(5, "a", "x", Factor::kDefault, 0),
            RolloutSeed(6, "a", "x", Factor::kDefault, 0));
}

TEST(Plan, ExecutionOrderAndWorkersDoNotChangeResults) {
  const EvalPlan plan = SmallPlan();
  const PlanResult serial = RunPlan(plan, Config(), Scripted());
  RunOptions shuffled;
  shuffled.shuffle_seed = 99;
  shuffled.workers = 3;
  std::vector<std::string> seen;
  std::mutex mu;
  shuffled.on_cell = [&](const CellOutcome& c) {
    std::lock_guard<std::mutex> lock(mu);
    seen.push_back(c.model + c.task + c.factor);
  };
  EXPECT_EQ(RunPlan(plan, Config(), Scripted(), shuffled), serial);
  EXPECT_EQ(seen.size(), serial.cells.size());
}

TEST(Plan, RecordsAreWrittenAndReplay) {
  EvalPlan plan = SmallPlan();
  plan.models.resize(1);
  plan.tasks.resize(1);
  const fs::path dir = TempDir("records");
  RunOptions options;
  options.records_dir = dir;
  RunPlan(plan, Config(), Scripted(), options);
  int n = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const RolloutRecord rec = LoadRolloutRecord(entry.path());
    EXPECT_TRUE(ReplayRecord(rec).ok) << entry.path();
    ++n;
  }
  EXPECT_EQ(n, 4);
  EXPECT_TRUE(fs::exists(dir / RecordFileName("expert", "pick_can", "V-LIGHT", 1)));
  fs::remove_all(dir);
}

TEST(Plan, InapplicableCellsAreKeptOutOfTheTable) {
  EvalPlan plan;
  plan.models = {{"hold", "scripted:hold"}};
  plan.tasks = {Task("open_drawer")};
  plan.factors = {Factor::kDefault, Factor::kBHobj};
  plan.rollouts_per_cell = 2;
  const PlanResult r = RunPlan(plan, Config(), Scripted());
  ASSERT_EQ(r.cells.size(), 2u);
  EXPECT_EQ(r.cells[1].status, CellStatus::kNotApplicable);
  EXPECT_FALSE(r.cells[1].message.empty());
  EXPECT_EQ(r.table.Find("hold", "open_drawer", "B-HOBJ"), nullptr);
  EXPECT_NE(r.table.Find("hold", "open_drawer", "DEFAULT"), nullptr);
}

// Fails every episode of one task; everything else holds still.
class FailsOn : public HoldPolicy {
 public:
  explicit FailsOn(std::string task) : task_(std::move(task)) {}
  std::string Id() const override { return "fails_on"; }
  void Reset(const EpisodeStart& start) override { current_ = start.task_id; }
  std::vector<arm::ActionCommand> Act(const Observation& obs) override {
    if (current_ == task_ && obs.step >= 4) throw std::runtime_error("policy crashed");
    return HoldPolicy::Act(obs);
  }

 private:
  std::string task_, current_;
};

TEST(Plan, FailedRolloutsMakeTheCellIncompleteOnly) {
  EvalPlan plan = SmallPlan();
  plan.models = {{"flaky", "scripted:hold"}, {"hold", "scripted:hold"}};
  ModelPolicyFactory factory = [](const ModelSpec& m) -> std::unique_ptr<Policy> {
    if (m.name == "flaky") return std::make_unique<FailsOn>("push_button");
    return std::make_unique<HoldPolicy>();
  };
  const PlanResult r = RunPlan(plan, Config(), factory);
  for (const auto& c : r.cells) {
    const bool broken = c.model == "flaky" && c.task == "push_button";
    EXPECT_EQ(c.status, broken ? CellStatus::kIncomplete : CellStatus::kComplete)
        << c.model << " " << c.task << " " << c.factor;
    EXPECT_EQ(r.table.Find(c.model, c.task, c.factor) != nullptr, !broken);
    if (broken) EXPECT_NE(c.message.find("policy crashed"), std::string::npos);
  }
  // Healthy cells of the flaky model match the hold model exactly.
  EXPECT_EQ(r.table.At("flaky", "pick_can", "V-LIGHT"), r.table.At("hold", "pick_can", "V-LIGHT"));
}

TEST(Plan, RemoteServerFailingMidPlanOnlyAffectsLaterCells) {
  // The server breaks after serving the first cell's two 300-step rollouts.
  class Breaks : public HoldPolicy {
   public:
    explicit Breaks(std::atomic<int>* acts) : acts_(acts) {}
    std::vector<arm::ActionCommand> Act(const Observation& obs) override {
      if (++*acts_ > 2 * 300) throw std::runtime_error("server broke");
      return HoldPolicy::Act(obs);
    }
    std::atomic<int>* acts_;
  };
  Listener listener("127.0.0.1", 0);
  std::atomic<bool> stop{false};
  std::atomic<int> acts{0};
  std::thread server([&] {
    Serve(listener, [&] { return std::make_unique<Breaks>(&acts); }, {}, &stop);
  });
  EvalPlan plan;
  plan.models = {{"remote", "tcp://127.0.0.1:" + std::to_string(listener.port())}};
  plan.tasks = {Task("pick_can"), Task("push_button")};
  for (auto& t : plan.tasks) t.max_steps = 300;
  plan.factors = {Factor::kDefault};
  plan.rollouts_per_cell = 2;
  RemoteOptions ro;
  ro.timeout = std::chrono::milliseconds(5000);
  const PlanResult r = RunPlan(plan, Config(), [&](const ModelSpec& m) {
    return MakePolicy(m, Config().params, ro);
  });
  stop = true;
  server.join();
  ASSERT_EQ(r.cells.size(), 2u);
  EXPECT_EQ(r.cells[0].status, CellStatus::kComplete);
  EXPECT_EQ(r.cells[1].status, CellStatus::kIncomplete);
  for (const auto& s : r.cells[1].rollouts) EXPECT_EQ(s.status, EpisodeStatus::kProtocolError);
  EXPECT_NE(r.cells[1].message.find("server broke"), std::string::npos);
  EXPECT_NE(r.table.Find("remote", "pick_can", "DEFAULT"), nullptr);
  EXPECT_EQ(r.table.Find("remote", "push_button", "DEFAULT"), nullptr);
}

TEST(Plan, UnreachableEndpointFailsUpFront) {
  int port = 0;
  {
    Listener probe("127.0.0.1", 0);
    port = probe.port();
  }
  EvalPlan plan = SmallPlan();
  plan.models = {{"gone", "tcp://127.0.0.1:" + std::to_string(port)}};
  ModelPolicyFactory factory = [](const ModelSpec& m) {
    return MakePolicy(m, Config().params, RemoteOptions{});
  };
  EXPECT_THROW(RunPlan(plan, Config(), factory), ConnectionLost);
}

TEST(Plan, ValidationRejectsBadPlans) {
  EvalPlan plan = SmallPlan();
  plan.rollouts_per_cell = 0;
  EXPECT_THROW(plan.Validate(), std::invalid_argument);
  plan = SmallPlan();
  plan.models.push_back(plan.models[0]);
  EXPECT_THROW(plan.Validate(), std::invalid_argument);
  plan = SmallPlan();
  plan.factors.push_back(Factor::kDefault);
  EXPECT_THROW(plan.Validate(), std::invalid_argument);
  plan = SmallPlan();
  plan.tasks.clear();
  EXPECT_THROW(plan.Validate(), std::invalid_argument);
  EXPECT_THROW(MakePolicy({"x", "http://nope"}, Config().params, {}), std::invalid_argument);
}

TEST(Plan, ResultJsonRoundTrips) {
  const PlanResult r = RunPlan(SmallPlan(), Config(), Scripted());
  const Json j = PlanResultToJson(r);
  EXPECT_EQ(PlanResultFromJson(Json::parse(j.dump())), r);
}

TEST(Plan, RecordFileNamesAreSanitized) {
  EXPECT_EQ(RecordFileName("m", "t", "V-AUG", 7), "m__t__V-AUG__007.json");
  EXPECT_EQ(RecordFileName("a/b c", "t", "DEFAULT", 12).find('/'), std::string::npos);
}

// Report

ProgressionTable TwoModelTable() {
  ProgressionTable t;
  auto set = [&](const std::string& m, const std::string& task, const std::string& f, double v) {
    t.Set(m, task, f, Cell{v, 10, static_cast<int>(std::lround(v * 10))});
  };
  for (const auto& m : {std::string("a"), std::string("b")}) {
    const double base = m == "a" ? 0.8 : 0.5;
    set(m, "t1", "DEFAULT", base);
    set(m, "t2", "DEFAULT", base - 0.1);
    set(m, "t1", "V-AUG", base - 0.05);
    set(m, "t2", "V-AUG", base - 0.1);
    set(m, "t1", "B-HOBJ", base - 0.4);
    set(m, "t2", "B-HOBJ", base - 0.3);
    set(m, "t1", "S-LANG", base);
    set(m, "t2", "S-LANG", base - 0.1);
  }
  // Only one model has this cell; it cannot be paired.
  set("a", "t3", "DEFAULT", 0.9);
  set("a", "t3", "V-AUG", 0.1);
  return t;
}

TEST(Report, PairedTableKeepsTasksEveryModelCovers) {
  const ProgressionTable paired = PairedTable(TwoModelTable(), "V-AUG");
  EXPECT_EQ(paired.Tasks(), (std::vector<std::string>{"t1", "t2"}));
  EXPECT_EQ(paired.Factors(), (std::vector<std::string>{"DEFAULT", "V-AUG"}));
}

TEST(Report, RankingIsSortedWithUndefinedLast) {
  const auto ranks = RankFactors(TwoModelTable());
  ASSERT_EQ(ranks.size(), 3u);
  EXPECT_EQ(ranks.front().factor, "B-HOBJ");
  for (size_t i = 1; i < ranks.size(); ++i) {
    const auto& p = ranks[i - 1];
    const auto& q = ranks[i];
    if (p.mean_normalized_rmsd && q.mean_normalized_rmsd) {
      EXPECT_GE(*p.mean_normalized_rmsd, *q.mean_normalized_rmsd);
    } else {
      EXPECT_TRUE(p.mean_normalized_rmsd.has_value() || !q.mean_normalized_rmsd.has_value());
    }
  }
  for (const auto& r : ranks) EXPECT_EQ(r.tasks, 2) << r.factor;
  const auto& slang = *std::find_if(ranks.begin(), ranks.end(),
                                    [](const FactorRank& r) { return r.factor == "S-LANG"; });
  EXPECT_EQ(slang.rmsd, 0.0);
  // Pooled RMSD of B-HOBJ: deviations 0.4, 0.2 per model.
  EXPECT_NEAR(ranks.front().rmsd, std::sqrt((0.16 + 0.04) / 2.0), 1e-12);
}

TEST(Report, QuantileMatchesLinearInterpolation) {
  const std::vector<double> v = {4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(Quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(Quantile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(Quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(Quantile(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(Quantile({7.0}, 0.3), 7.0);
  EXPECT_THROW(Quantile({}, 0.5), std::invalid_argument);
  EXPECT_THROW(Quantile(v, 1.5), std::invalid_argument);
}

TEST(Report, RealResultsParseAndCompare) {
  const fs::path dir = TempDir("real");
  {
    std::ofstream out(dir / "real.csv");
    out << "model,task,progression\r\na,t1,0.7\nb,t1,0.4\na,t2,0.6\nb,t2,0.5\nc,t1,0.1\n";
  }
  const auto real = LoadRealResults(dir / "real.csv");
  ASSERT_EQ(real.size(), 5u);
  const RealComparison cmp = CompareWithReal(TwoModelTable(), real);
  EXPECT_EQ(cmp.pairs, 4);  // model c has no simulated cells
  ASSERT_TRUE(cmp.mmrv);
  EXPECT_EQ(*cmp.mmrv, 0.0);
  EXPECT_EQ(cmp.tasks, 2);
  EXPECT_EQ(cmp.mean_task_mmrv, 0.0);
  ASSERT_TRUE(cmp.pearson);
  EXPECT_GT(*cmp.pearson, 0.5);

  {
    std::ofstream out(dir / "bad_header.csv");
    out << "model,task,score\n";
  }
  EXPECT_THROW(LoadRealResults(dir / "bad_header.csv"), std::invalid_argument);
  {
    std::ofstream out(dir / "bad_value.csv");
    out << "model,task,progression\na,t1,1.5\n";
  }
  EXPECT_THROW(LoadRealResults(dir / "bad_value.csv"), std::invalid_argument);
  {
    std::ofstream out(dir / "bad_fields.csv");
    out << "model,task,progression\na,t1\n";
  }
  EXPECT_THROW(LoadRealResults(dir / "bad_fields.csv"), std::invalid_argument);
  fs::remove_all(dir);
}

TEST(Report, EmissionIsDeterministicAndComplete) {
  PlanResult result = RunPlan(SmallPlan(), Config(), Scripted());
  const fs::path a = TempDir("report_a");
  const fs::path b = TempDir("report_b");
  EmitReport(result, a);
  EmitReport(PlanResultFromJson(PlanResultToJson(result)), b);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  for (const char* want : {"report.json", "radar.csv", "factor_ranking.csv", "posteriors.csv",
                           "time_to_completion.csv", "radar_expert.svg", "radar_hold.svg"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
  }
  for (const auto& n : names) EXPECT_EQ(Slurp(a / n), Slurp(b / n)) << n;

  const Json report = Json::parse(Slurp(a / "report.json"));
  EXPECT_EQ(report["factor_ranking"].size(), 1u);
  EXPECT_EQ(report["factor_ranking"][0]["factor"], "V-LIGHT");
  // One radar row per model and factor.
  std::istringstream radar(Slurp(a / "radar.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(radar, line)) ++rows;
  EXPECT_EQ(rows, 4);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Report, DefaultOnlyPlanHasOneRadarRowPerModel) {
  EvalPlan plan = SmallPlan();
  plan.factors = {Factor::kDefault};
  const fs::path dir = TempDir("report_default");
  EmitReport(RunPlan(plan, Config(), Scripted()), dir);
  EXPECT_EQ(Slurp(dir / "radar.csv"),
            "model,factor,mean_progression,tasks\n"
            "expert,DEFAULT,1.000000,2\n"
            "hold,DEFAULT,0.000000,2\n");
  EXPECT_EQ(Slurp(dir / "factor_ranking.csv"),
            "rank,factor,mean_normalized_rmsd,rmsd,mean_effect_deviation,tasks\n");
  fs::remove_all(dir);
}

}  // namespace
}  // namespace realm::harness
