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

// realm: command-line front end for evaluation runs, system identification,
// reports, record replay, policy serving and protocol fixtures.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "realm/arm/params_io.h"
#include "realm/harness/episode.h"
#include "realm/harness/plan.h"
#include "realm/harness/protocol.h"
#include "realm/harness/remote.h"
#include "realm/harness/report.h"
#include "realm/harness/scripted.h"
#include "realm/perturb/perturb.h"
#include "realm/sysid/sysid.h"
#include "realm/world/scene_io.h"
#include "realm/world/task.h"

namespace fs = std::filesystem;
using namespace realm;

namespace {

std::atomic<bool> g_stop{false};

void OnSignal(int) { g_stop = true; }

std::vector<perturb::Factor> ParseFactors(const std::string& list) {
  std::vector<perturb::Factor> out;
  if (list == "all") {
    const auto& all = perturb::AllFactors();
    return {all.begin(), all.end()};
  }
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(perturb::ParseFactor(item));
  }
  if (out.empty()) throw std::invalid_argument("empty factor list");
  // DEFAULT is the reference every metric is computed against.
  if (std::find(out.begin(), out.end(), perturb::Factor::kDefault) == out.end()) {
    out.insert(out.begin(), perturb::Factor::kDefault);
  }
  return out;
}

harness::ModelSpec ParseModel(const std::string& arg) {
  const size_t eq = arg.find('=');
  if (eq != std::string::npos && arg.rfind("tcp://", 0) != 0 && arg.rfind("scripted:", 0) != 0) {
    return {arg.substr(0, eq), arg.substr(eq + 1)};
  }
  return {arg, arg};
}

void WriteJson(const fs::path& path, const Json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

int RunCommand(const fs::path& data, const std::string& tasks_sel, const std::string& factors,
               const std::vector<std::string>& policies, int rollouts, uint64_t seed,
               const fs::path& out, int workers, const std::string& params_path, int timeout_ms,
               bool no_records) {
  harness::EpisodeConfig config = harness::LoadEpisodeConfig(data);
  if (!params_path.empty()) config.params = arm::LoadArmParams(params_path);

  harness::EvalPlan plan;
  for (const auto& p : policies) plan.models.push_back(ParseModel(p));
  plan.tasks = world::LoadTaskSet(data / "task_sets.json", tasks_sel);
  plan.factors = ParseFactors(factors);
  plan.rollouts_per_cell = rollouts;
  plan.base_seed = seed;
  plan.Validate();

  harness::RemoteOptions remote;
  remote.timeout = std::chrono::milliseconds(timeout_ms);
  remote.cameras = harness::CameraInfos(world::LoadScene(plan.tasks.front().scene_path));
  const auto factory = [&](const harness::ModelSpec& m) {
    return harness::MakePolicy(m, config.params, remote);
  };

  harness::RunOptions options;
  options.workers = workers;
  if (!no_records) options.records_dir = out / "records";
  size_t done = 0;
  const size_t total = plan.models.size() * plan.tasks.size() * plan.factors.size();
  options.on_cell = [&](const harness::CellOutcome& c) {
    ++done;
    double mean = 0.0;
    for (const auto& r : c.rollouts) mean += r.score;
    if (!c.rollouts.empty()) mean /= static_cast<double>(c.rollouts.size());
    std::fprintf(stderr, "[%zu/%zu] %s %s %s: %s mean %.3f\n", done, total, c.model.c_str(),
                 c.task.c_str(), c.factor.c_str(), std::string(CellStatusName(c.status)).c_str(),
                 mean);
  };

  const auto t0 = std::chrono::steady_clock::now();
  const harness::PlanResult result = harness::RunPlan(plan, config, factory, options);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json plan_json = {{"rollouts_per_cell", plan.rollouts_per_cell},
                    {"base_seed", plan.base_seed},
                    {"tasks", tasks_sel},
                    {"factors", Json::array()},
                    {"models", Json::array()}};
  for (const auto f : plan.factors) plan_json["factors"].push_back(perturb::FactorName(f));
  for (const auto& m : plan.models) {
    plan_json["models"].push_back({{"name", m.name}, {"policy", m.policy}});
  }
  WriteJson(out / "plan.json", plan_json);
  WriteJson(out / "cells.json", harness::PlanResultToJson(result));
  harness::EmitReport(result, out / "report");

  std::printf("%zu rollouts in %.1f s\n", plan.NumRollouts(), secs);
  for (const auto& m : result.table.Models()) {
    for (const auto& f : result.table.Factors()) {
      double sum = 0.0;
      int n = 0;
      for (const auto& t : result.table.Tasks()) {
        if (const auto* c = result.table.Find(m, t, f)) {
          sum += c->mean;
          ++n;
        }
      }
      if (n > 0) std::printf("%-28s %-9s mean progression %.4f over %d tasks\n", m.c_str(),
                             f.c_str(), sum / n, n);
    }
  }
  std::printf("report written to %s\n", (out / "report").string().c_str());
  return 0;
}

int ReplayCommand(const fs::path& path) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  int bad = 0;
  for (const auto& f : files) {
    const harness::ReplayReport r = harness::ReplayRecord(harness::LoadRolloutRecord(f));
    if (!r.ok) {
      ++bad;
      std::printf("MISMATCH %s: %s\n", f.string().c_str(), r.detail.c_str());
    } else if (files.size() == 1) {
      std::printf("OK %s: %d steps reproduced exactly\n", f.string().c_str(), r.steps_checked);
    }
  }
  std::printf("%zu records checked, %d mismatched\n", files.size(), bad);
  return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy evaluation harness: simulation runs, system identification and reports"};
  app.require_subcommand(1);
  std::string data = REALM_DEFAULT_DATA_DIR;
  app.add_option("--data-dir", data, "Directory with arm/, config/, scenes/ and tasks/")
      ->check(CLI::ExistingDirectory);

  auto* run = app.add_subcommand("run", "Run an evaluation plan");
  std::string tasks = "base", factors = "DEFAULT", out, params_path;
  std::vector<std::string> policies;
  int rollouts = 25, workers = 1, timeout_ms = 10000;
  uint64_t seed = 0;
  bool no_records = false;
  run->add_option("--tasks", tasks, "Task set")->check(CLI::IsMember({"base", "articulated", "all"}));
  run->add_option("--factors", factors, "Comma-separated factor ids or 'all'");
  run->add_option("--policy", policies,
                  "Policy endpoint (repeatable): scripted:{expert,noisy:<sigma>,random,hold,zero} "
                  "or tcp://host:port, optionally prefixed by name=")
      ->required();
  run->add_option("--rollouts", rollouts, "Rollouts per cell")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Base seed");
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--params", params_path, "Arm parameters JSON (default: shipped arm)")
      ->check(CLI::ExistingFile);
  run->add_option("--timeout-ms", timeout_ms, "Per-request timeout for remote policies")
      ->check(CLI::PositiveNumber);
  run->add_flag("--no-records", no_records, "Do not write per-rollout records");

  auto* sysid_cmd = app.add_subcommand("sysid", "Identify friction and armature from trajectories");
  std::string sysid_data, base_params, sysid_out;
  uint64_t sysid_seed = 0;
  int sysid_workers = 1, budget = 8000;
  sysid_cmd->add_option("--data", sysid_data, "Directory of trajectory pair JSON files")
      ->required()
      ->check(CLI::ExistingDirectory);
  sysid_cmd->add_option("--base", base_params, "Initial arm parameters JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sysid_cmd->add_option("--out", sysid_out, "Identified parameters JSON")->required();
  sysid_cmd->add_option("--seed", sysid_seed, "Optimizer seed");
  sysid_cmd->add_option("--workers", sysid_workers, "Concurrent loss evaluations");
  sysid_cmd->add_option("--budget", budget, "CMA-ES evaluation budget");

  auto* synth = app.add_subcommand("synth", "Write synthetic trajectory pairs from known parameters");
  std::string truth_path, synth_out;
  int pairs = 3, ticks = 150;
  uint64_t synth_seed = 0;
  synth->add_option("--truth", truth_path, "Ground-truth arm parameters JSON")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--pairs", pairs, "Number of trajectory pairs")->check(CLI::PositiveNumber);
  synth->add_option("--ticks", ticks, "Control ticks per pair")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "Command seed");

  auto* report = app.add_subcommand("report", "Re-emit the report of a finished run");
  std::string report_in, real_csv;
  report->add_option("--in", report_in, "Run output directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--real", real_csv, "CSV of real results: model,task,progression")
      ->check(CLI::ExistingFile);

  auto* replay = app.add_subcommand("replay", "Re-simulate stored actions and verify states");
  std::string record;
  replay->add_option("--record", record, "Record file or directory of records")
      ->required()
      ->check(CLI::ExistingPath);

  auto* serve = app.add_subcommand("serve", "Serve a scripted policy over the wire protocol");
  std::string host = "127.0.0.1", serve_policy = "scripted:expert";
  int port = 5555, connections = 0;
  serve->add_option("--host", host, "IPv4 address to bind");
  serve->add_option("--port", port, "TCP port (0 picks a free one)");
  serve->add_option("--policy", serve_policy, "scripted:<name>");
  serve->add_option("--connections", connections, "Exit after this many sessions (0 = forever)");

  auto* golden = app.add_subcommand("golden", "Write the protocol golden-frame fixtures");
  std::string golden_out;
  golden->add_option("--out", golden_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return RunCommand(data, tasks, factors, policies, rollouts, seed, out, workers, params_path,
                        timeout_ms, no_records);
    }
    if (*sysid_cmd) {
      const sysid::SysIdDataset dataset = sysid::LoadDataset(sysid_data);
      const arm::ArmParams base = arm::LoadArmParams(base_params);
      sysid::IdentifyOptions opts;
      opts.seed = sysid_seed;
      opts.workers = sysid_workers;
      opts.cma_budget = budget;
      const sysid::IdentifyResult r = sysid::Identify(dataset, base, opts);
      arm::SaveArmParams(r.params, sysid_out);
      std::printf("loss: initial %.6g, after CMA-ES %.6g, final %.6g (%d evaluations)\n",
                  r.init_loss, r.cma_loss, r.final_loss, r.evaluations);
      std::printf("wrote %s\n", sysid_out.c_str());
      return 0;
    }
    if (*synth) {
      const arm::ArmParams truth = arm::LoadArmParams(truth_path);
      sysid::SaveDataset(
          sysid::SyntheticDataset(truth, harness::HomeJoints(), pairs, ticks, synth_seed),
          synth_out);
      std::printf("wrote %d pairs to %s\n", pairs, synth_out.c_str());
      return 0;
    }
    if (*report) {
      const fs::path in = report_in;
      std::ifstream cells(in / "cells.json");
      if (!cells) throw std::runtime_error("no cells.json in " + in.string());
      const harness::PlanResult result = harness::PlanResultFromJson(Json::parse(cells));
      std::optional<std::vector<harness::RealResult>> real;
      if (!real_csv.empty()) real = harness::LoadRealResults(real_csv);
      harness::EmitReport(result, in / "report", real);
      std::printf("report written to %s\n", (in / "report").string().c_str());
      return 0;
    }
    if (*replay) return ReplayCommand(record);
    if (*serve) {
      const arm::ArmParams params = arm::LoadArmParams(fs::path(data) / "arm" / "droid_panda.json");
      harness::MakePolicy({serve_policy, serve_policy}, params, {});  // validate early
      harness::Listener listener(host, port);
      std::printf("serving %s on %s:%d\n", serve_policy.c_str(), host.c_str(), listener.port());
      std::fflush(stdout);
      std::signal(SIGINT, OnSignal);
      std::signal(SIGTERM, OnSignal);
      harness::ServeOptions opts;
      opts.max_connections = connections;
      harness::Serve(
          listener,
          [&] { return harness::MakePolicy({serve_policy, serve_policy}, params, {}); }, opts,
          &g_stop);
      return 0;
    }
    if (*golden) {
      harness::WriteGoldenFrames(golden_out);
      std::printf("wrote %zu fixtures to %s\n", harness::GoldenMessages().size(), golden_out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
