// Copyright 2026 The LenXfer Authors
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

// lenxfer: dataset generation, training, evaluation, length sweeps,
// head-ablation analysis and report merging.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lenxfer/checkpoint.h"
#include "lenxfer/eval.h"
#include "lenxfer/instance.h"
#include "lenxfer/mech.h"
#include "lenxfer/trainer.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace lenxfer {
namespace {

std::string Hex64(std::string_view text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << h;
  return o.str();
}

// Every standalone artifact gets <path>.manifest.json beside it.
void WriteSidecar(const std::string& path, std::string_view kind, const std::string& command,
                  const std::string& config_text, const Json& seeds) {
  Json j;
  j["kind"] = kind;
  j["command"] = command;
  j["git"] = GitDescribe();
  j["config_hash"] = Hex64(config_text);
  j["seeds"] = seeds;
  j["config"] = config_text;
  WriteFileAtomic(path + ".manifest.json", j.dump(2) + "\n");
}

std::vector<uint64_t> ParseSeeds(const std::string& spec) {
  std::vector<uint64_t> out;
  for (int v : ParseLengths(spec)) {
    if (v < 0) throw std::invalid_argument("seeds must be non-negative");
    out.push_back(static_cast<uint64_t>(v));
  }
  return out;
}

RunConfig LoadRunConfig(const std::string& path, const std::string& group) {
  if (path.empty()) {
    if (group.empty()) throw std::invalid_argument("need --config or --group");
    return RunConfig::Parse("group = " + group + "\n");
  }
  RunConfig c = RunConfig::Parse(ReadFile(path));
  if (!group.empty()) c.Set("group", group);
  return c;
}

struct CommonFlags {
  std::string config;
  std::string group;
  std::string out;
  std::string lengths;
  std::vector<std::string> sets;
  bool strict = false;
  bool quiet = false;
};

void ApplyOverrides(RunConfig& c, const CommonFlags& f, CLI::Option* seed, uint64_t seed_value, CLI::Option* data_seed,
                    uint64_t data_seed_value) {
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    c.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (seed && seed->count()) c.model_seed = seed_value;
  if (data_seed && data_seed->count()) c.data_seed = data_seed_value;
  if (!f.lengths.empty()) c.eval_lengths = ParseLengths(f.lengths);
  if (f.strict) c.strict = true;
  c.Validate();
}

std::function<void(const std::string&)> Logger(bool quiet) {
  if (quiet) return nullptr;
  return [](const std::string& line) { std::cerr << line << std::endl; };
}

int RunGen(const std::string& command, const std::string& task_name, int length, const std::string& lengths, int n,
           uint64_t seed, const std::string& split, int query_width, const std::string& out) {
  const Task task = TaskFromName(task_name);
  TaskOptions options;
  if (query_width > 0) options.mqar.query_width = query_width;
  std::vector<int> lens = lengths.empty() ? std::vector<int>{length} : ParseLengths(lengths);
  if (lens.empty() || lens.front() < 1) throw std::invalid_argument("need --length or --lengths");
  if (split != "test" && split != "train") throw std::invalid_argument("--split must be test or train");
  std::ostringstream body;
  for (int len : lens) {
    for (int i = 0; i < n; ++i) {
      TextInstance inst;
      if (split == "test") {
        inst = TestTextInstance(task, len, seed, i, options);
      } else {
        Rng rng = Rng::Stream(seed, {static_cast<uint64_t>(task), static_cast<uint64_t>(len), static_cast<uint64_t>(i)});
        inst = SampleTextInstance(task, len, options, rng);
      }
      body << ToJsonLine(inst) << '\n';
    }
  }
  if (out.empty() || out == "-") {
    std::cout << body.str();
    return 0;
  }
  if (const auto parent = fs::path(out).parent_path(); !parent.empty()) fs::create_directories(parent);
  WriteFileAtomic(out, body.str());
  std::ostringstream cfg;
  cfg << "task = " << task_name << "\nlengths = ";
  for (size_t i = 0; i < lens.size(); ++i) cfg << (i ? "," : "") << lens[i];
  cfg << "\nn = " << n << "\nsplit = " << split << "\nmqar_query_width = " << options.mqar.query_width << '\n';
  WriteSidecar(out, "gen", command, cfg.str(), {{"seed", seed}});
  return 0;
}

int RunTrain(const std::string& command, const CommonFlags& f, CLI::Option* seed_opt, uint64_t seed,
             CLI::Option* data_seed_opt, uint64_t data_seed, const std::string& resume, int64_t stop_at) {
  if (f.out.empty()) throw std::invalid_argument("--out is required");
  RunConfig c;
  if (!resume.empty() && f.config.empty() && f.group.empty()) {
    c = RunConfig::Parse(LoadCheckpoint(resume).run_config);
  } else {
    c = LoadRunConfig(f.config, f.group);
  }
  ApplyOverrides(c, f, seed_opt, seed, data_seed_opt, data_seed);
  fs::create_directories(f.out);
  {
    std::ostringstream v;
    Vocab::Get().Dump(v);
    WriteFileAtomic((fs::path(f.out) / "vocab.txt").string(), v.str());
  }
  TrainOptions opts;
  opts.command = command;
  opts.resume_from = resume;
  opts.stop_at = stop_at;
  opts.log = Logger(f.quiet);
  const TrainResult r = TrainRun(c, f.out, opts);
  std::cerr << (r.finished ? "finished" : "stopped") << " at iteration " << r.iterations << "; "
            << r.checkpoints.size() << " checkpoints in " << (fs::path(f.out) / "checkpoints").string() << std::endl;
  return 0;
}

int RunEval(const std::string& command, const CommonFlags& f, const std::string& checkpoint,
            const std::vector<std::string>& tasks, int n, CLI::Option* seed_opt, uint64_t seed, bool semantic) {
  if (checkpoint.empty()) throw std::invalid_argument("--checkpoint is required");
  if (f.out.empty()) throw std::invalid_argument("--out is required");
  if (f.strict) SetNumThreads(1);
  const Checkpoint ckpt = LoadCheckpoint(checkpoint);
  std::optional<RunConfig> cfg;
  if (!f.config.empty() || !f.group.empty()) {
    cfg = LoadRunConfig(f.config, f.group);
  } else if (!ckpt.run_config.empty()) {
    cfg = RunConfig::Parse(ckpt.run_config);
  }
  std::vector<Task> task_list;
  for (const auto& t : tasks) task_list.push_back(TaskFromName(t));
  if (task_list.empty()) {
    if (!cfg) throw std::invalid_argument("checkpoint has no run config; pass --task");
    for (const auto& m : cfg->group.members) {
      if (std::find(task_list.begin(), task_list.end(), m.task) == task_list.end()) task_list.push_back(m.task);
    }
  }
  RunConfig base = cfg.value_or(RunConfig{});
  if (!f.lengths.empty()) base.eval_lengths = ParseLengths(f.lengths);
  if (seed_opt->count()) base.test_seed = seed;
  if (!cfg && base.eval_lengths.empty()) throw std::invalid_argument("pass --lengths");
  EvalOptions eval = base.MakeEvalOptions(n);
  eval.semantic = semantic;
  const LogitFn model = ModelLogits(ckpt.params);
  std::vector<AccuracyCurve> curves;
  for (Task t : task_list) {
    std::vector<int> lens;
    if (cfg) {
      lens = base.EvalLengthsFor(t);
    } else {
      for (int len : base.eval_lengths) {
        if (len >= MinLength(t, eval.task_options)) lens.push_back(len);
      }
    }
    curves.push_back(ComputeAccuracyCurve(model, t, lens, eval, ckpt.iteration));
    if (!f.quiet) {
      for (const auto& p : curves.back().points) {
        std::cerr << TaskName(t) << " length " << p.length << ": " << std::fixed << std::setprecision(4) << p.accuracy
                  << std::endl;
      }
    }
  }
  std::ostringstream csv;
  csv << std::setprecision(17);
  WriteCurveCsv(csv, curves);
  if (const auto parent = fs::path(f.out).parent_path(); !parent.empty()) fs::create_directories(parent);
  WriteFileAtomic(f.out, csv.str());
  WriteSidecar(f.out, "eval", command, ckpt.run_config,
               {{"data_seed", ckpt.data_seed}, {"model_seed", ckpt.model_seed}, {"test_seed", eval.seed}});
  return 0;
}

int RunSweepCommand(const std::string& command, const CommonFlags& f, CLI::Option* data_seed_opt, uint64_t data_seed,
                    const std::string& sweep_lengths, const std::string& seeds, int jobs, bool dry_run) {
  SweepOptions opts;
  if (!sweep_lengths.empty()) opts.lengths = ParseLengths(sweep_lengths);
  if (!seeds.empty()) opts.seeds = ParseSeeds(seeds);
  opts.jobs = jobs;
  const auto cells = PlanSweep(opts);
  if (dry_run) {
    std::cout << "main_len,aux_len,seed\n";
    for (const auto& c : cells) std::cout << c.main_length << ',' << c.aux_length << ',' << c.seed << '\n';
    std::cerr << cells.size() << " runs planned" << std::endl;
    return 0;
  }
  if (f.out.empty()) throw std::invalid_argument("--out is required");
  RunConfig c = LoadRunConfig(f.config, f.group);
  ApplyOverrides(c, f, nullptr, 0, data_seed_opt, data_seed);
  TrainOptions topts;
  topts.command = command;
  topts.log = Logger(f.quiet);
  RunSweep(c, f.out, opts, topts);
  Json j;
  j["kind"] = "sweep";
  j["command"] = command;
  j["git"] = GitDescribe();
  j["config_hash"] = c.Hash();
  j["data_seed"] = c.data_seed;
  j["model_seeds"] = opts.seeds;
  j["lengths"] = opts.lengths;
  j["config"] = c.ToText();
  WriteFileAtomic((fs::path(f.out) / "sweep_manifest.json").string(), j.dump(2) + "\n");
  return 0;
}

std::vector<std::string> RunCheckpoints(const std::string& run_dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(fs::path(run_dir) / "checkpoints")) {
    if (e.path().extension() == ".bin") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int RunAblate(const std::string& command, const CommonFlags& f, std::vector<std::string> checkpoints,
              const std::string& run_dir, const std::string& main_name, const std::string& aux_name, int length,
              int n, int gap_n, bool sum_rows) {
  if (f.out.empty()) throw std::invalid_argument("--out is required");
  if (f.strict) SetNumThreads(1);
  if (!run_dir.empty()) {
    const auto found = RunCheckpoints(run_dir);
    checkpoints.insert(checkpoints.end(), found.begin(), found.end());
  }
  if (checkpoints.empty()) throw std::invalid_argument("need --checkpoint or --run");
  std::vector<CircuitCheckpoint> series;
  std::string run_config;
  for (const auto& path : checkpoints) {
    Checkpoint c = LoadCheckpoint(path);
    if (run_config.empty()) run_config = c.run_config;
    series.push_back({c.iteration, std::move(c.params)});
  }
  std::sort(series.begin(), series.end(), [](const auto& a, const auto& b) { return a.iteration < b.iteration; });
  RunConfig cfg;
  if (!f.config.empty() || !f.group.empty()) {
    cfg = LoadRunConfig(f.config, f.group);
  } else if (!run_config.empty()) {
    cfg = RunConfig::Parse(run_config);
  } else {
    throw std::invalid_argument("checkpoints carry no run config; pass --config");
  }
  if (!f.lengths.empty()) cfg.eval_lengths = ParseLengths(f.lengths);
  const Task main = main_name.empty() ? cfg.group.Main().task : TaskFromName(main_name);
  Task aux = main;
  if (!aux_name.empty()) {
    aux = TaskFromName(aux_name);
  } else {
    bool found = false;
    for (const auto& m : cfg.group.members) {
      if (m.role == Role::kAuxiliary) {
        aux = m.task;
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("group has no auxiliary task; pass --aux");
  }
  CircuitOptions opts;
  const auto lm = cfg.EvalLengthsFor(main), la = cfg.EvalLengthsFor(aux);
  std::set_intersection(lm.begin(), lm.end(), la.begin(), la.end(), std::back_inserter(opts.gap_lengths));
  opts.analysis_length = length;
  opts.gap_eval = cfg.MakeEvalOptions(gap_n);
  opts.analysis_eval = cfg.MakeEvalOptions(n);
  opts.average_rows = !sum_rows;
  fs::create_directories(f.out);
  const CircuitSeries result = ComputeCircuitSeries(series, main, aux, opts);
  for (const auto& ck : series) {
    for (Task t : {main, aux}) {
      const AblationMap map = MeanAblationMap(ck.params, t, length, opts.analysis_eval, ck.iteration);
      std::ostringstream csv;
      csv << std::setprecision(17);
      WriteAblationCsv(csv, map);
      std::ostringstream name;
      name << "ablation_" << TaskName(t) << "_" << std::setw(8) << std::setfill('0') << ck.iteration << ".csv";
      WriteFileAtomic((fs::path(f.out) / name.str()).string(), csv.str());
    }
  }
  std::ostringstream csv;
  csv << std::setprecision(17);
  WriteSeriesCsv(csv, result);
  const std::string series_path = (fs::path(f.out) / "series.csv").string();
  WriteFileAtomic(series_path, csv.str());
  WriteSidecar(series_path, "ablate", command, cfg.ToText(),
               {{"data_seed", cfg.data_seed}, {"model_seed", cfg.model_seed}, {"test_seed", cfg.test_seed}});
  if (!f.quiet) std::cerr << csv.str();
  return 0;
}

}  // namespace
}  // namespace lenxfer

int main(int argc, char** argv) {
  using namespace lenxfer;
  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);
  SetNumThreads(0);

  CLI::App app{"Length-generalization transfer experiments: data, training, evaluation and analysis."};
  app.require_subcommand(1);
  CommonFlags f;
  uint64_t seed = 0, data_seed = 0;

  auto* gen = app.add_subcommand("gen", "Write task instances as JSONL");
  std::string task_name, split = "test", gen_lengths;
  int length = 0, n_gen = 1024, query_width = 0;
  uint64_t gen_seed = 1234;
  gen->add_option("--task", task_name, "Task name")->required();
  gen->add_option("--length", length, "Length parameter");
  gen->add_option("--lengths", gen_lengths, "Length list, e.g. 1:8,12");
  gen->add_option("-n", n_gen, "Instances per length")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Generation seed");
  gen->add_option("--split", split, "test (evaluation stream) or train");
  gen->add_option("--mqar-query-width", query_width, "MQAR query width");
  gen->add_option("--out", f.out, "Output path; stdout when omitted");

  auto* train = app.add_subcommand("train", "Train one model");
  std::string resume;
  int64_t stop_at = -1;
  CLI::Option* train_seed = train->add_option("--seed", seed, "Model seed");
  CLI::Option* train_data_seed = train->add_option("--data-seed", data_seed, "Data seed");
  train->add_option("--config", f.config, "Run config file");
  train->add_option("--group", f.group, "Built-in task group or task name");
  train->add_option("--out", f.out, "Run directory");
  train->add_option("--lengths", f.lengths, "Evaluation lengths");
  train->add_option("--set", f.sets, "Config override key=value");
  train->add_option("--checkpoint,--resume", resume, "Resume from this checkpoint");
  train->add_option("--stop-at", stop_at, "Stop after this iteration");
  train->add_flag("--strict-deterministic", f.strict, "Single-threaded bitwise-reproducible run");
  train->add_flag("--quiet", f.quiet, "No progress output");

  auto* eval = app.add_subcommand("eval", "Accuracy curves for a checkpoint");
  std::string eval_ckpt;
  std::vector<std::string> eval_tasks;
  int n_eval = 1024;
  bool semantic = false;
  CLI::Option* eval_seed = eval->add_option("--seed", seed, "Test-set seed");
  eval->add_option("--checkpoint", eval_ckpt, "Checkpoint file");
  eval->add_option("--config", f.config, "Run config; defaults to the checkpoint's");
  eval->add_option("--group", f.group, "Built-in task group");
  eval->add_option("--task", eval_tasks, "Task(s) to evaluate");
  eval->add_option("--lengths", f.lengths, "Evaluation lengths");
  eval->add_option("-n", n_eval, "Examples per length")->check(CLI::PositiveNumber);
  eval->add_option("--out", f.out, "Curve CSV path");
  eval->add_flag("--semantic", semantic, "Also score DFS traces with the trace checker");
  eval->add_flag("--strict-deterministic", f.strict, "Single-threaded evaluation");
  eval->add_flag("--quiet", f.quiet, "No progress output");

  auto* sweep = app.add_subcommand("sweep", "Grid over main and auxiliary training lengths");
  std::string sweep_lengths, sweep_seeds;
  int jobs = 1;
  bool dry_run = false;
  CLI::Option* sweep_data_seed = sweep->add_option("--data-seed", data_seed, "Data seed shared by all runs");
  sweep->add_option("--config", f.config, "Base run config");
  sweep->add_option("--group", f.group, "Built-in task group");
  sweep->add_option("--out", f.out, "Sweep directory");
  sweep->add_option("--train-lengths", sweep_lengths, "Training maxima to sweep (default 4,8,...,256)");
  sweep->add_option("--seed,--seeds", sweep_seeds, "Model seeds (default 0:2)");
  sweep->add_option("--lengths", f.lengths, "Evaluation lengths");
  sweep->add_option("--set", f.sets, "Config override key=value");
  sweep->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  sweep->add_flag("--dry-run", dry_run, "Print the planned grid only");
  sweep->add_flag("--strict-deterministic", f.strict, "Single-threaded runs");
  sweep->add_flag("--quiet", f.quiet, "No progress output");

  auto* ablate = app.add_subcommand("ablate", "Attention and head-ablation metrics over checkpoints");
  std::vector<std::string> ablate_ckpts;
  std::string run_dir, main_name, aux_name;
  int analysis_length = 8, n_ablate = 256, n_gap = 256;
  bool sum_rows = false;
  ablate->add_option("--checkpoint", ablate_ckpts, "Checkpoint file(s)");
  ablate->add_option("--run", run_dir, "Run directory; uses all of its checkpoints");
  ablate->add_option("--config", f.config, "Run config; defaults to the checkpoints'");
  ablate->add_option("--group", f.group, "Built-in task group");
  ablate->add_option("--task", main_name, "Main task (default: group main)");
  ablate->add_option("--aux", aux_name, "Auxiliary task (default: first auxiliary)");
  ablate->add_option("--length", analysis_length, "Length for attention and ablation maps");
  ablate->add_option("--lengths", f.lengths, "Gap evaluation lengths");
  ablate->add_option("-n", n_ablate, "Examples for attention and ablation")->check(CLI::PositiveNumber);
  ablate->add_option("--gap-examples", n_gap, "Examples per gap length")->check(CLI::PositiveNumber);
  ablate->add_option("--out", f.out, "Output directory");
  ablate->add_flag("--sum-rows", sum_rows, "Sum attention differences over rows instead of averaging");
  ablate->add_flag("--strict-deterministic", f.strict, "Single-threaded analysis");
  ablate->add_flag("--quiet", f.quiet, "No progress output");

  auto* report = app.add_subcommand("report", "Merge completed runs into summary tables");
  std::string root = ".";
  report->add_option("--root", root, "Directory to scan");
  report->add_option("--out", f.out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return RunGen(command, task_name, length, gen_lengths, n_gen, gen_seed, split, query_width, f.out);
    if (*train) return RunTrain(command, f, train_seed, seed, train_data_seed, data_seed, resume, stop_at);
    if (*eval) return RunEval(command, f, eval_ckpt, eval_tasks, n_eval, eval_seed, seed, semantic);
    if (*sweep) return RunSweepCommand(command, f, sweep_data_seed, data_seed, sweep_lengths, sweep_seeds, jobs, dry_run);
    if (*ablate) {
      return RunAblate(command, f, ablate_ckpts, run_dir, main_name, aux_name, analysis_length, n_ablate, n_gap,
                       sum_rows);
    }
    if (*report) {
      const int runs = MergeReports(root, f.out);
      Json j;
      j["kind"] = "report";
      j["command"] = command;
      j["git"] = GitDescribe();
      j["runs"] = runs;
      WriteFileAtomic((fs::path(f.out) / "report_manifest.json").string(), j.dump(2) + "\n");
      std::cerr << "merged " << runs << " runs into " << f.out << std::endl;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "lenxfer: error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
