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

#include "lenxfer/trainer.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "lenxfer/checkpoint.h"
#include "lenxfer/tasks_maze.h"

#ifndef LENXFER_GIT_DESCRIBE
#define LENXFER_GIT_DESCRIBE "unknown"
#endif

namespace lenxfer {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
  }
  return out;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("bad boolean for " + std::string(key) + ": '" + std::string(value) + "'");
}

uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::set<std::string_view>& GroupKeys() {
  static const std::set<std::string_view> keys = {"group", "member", "name", "task_draw", "mqar_query_width",
                                                  "mqar_num_queries"};
  return keys;
}

const std::vector<SchedulePreset>& Presets() {
  static const std::vector<SchedulePreset> presets = {
      {"arithmetic", 1024, {1e-3, 2000, 20000, 5000}},
      {"string", 1024, {1e-3, 500, 5000, 1000}},
      {"maze", 256, {1e-3, 2000, 20000, 5000}},
      {"arithmetic_smollm", 128, {5e-5, 250, 2500, 500}},
      {"string_smollm", 128, {5e-5, 100, 1000, 500}},
      {"maze_smollm", 256, {5e-5, 250, 2500, 500}},
  };
  return presets;
}

std::string JoinLengths(const std::vector<int>& lengths) {
  std::string out;
  for (size_t i = 0; i < lengths.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(lengths[i]);
  }
  return out;
}

// Keeps the header and every row whose leading iteration is <= `iteration`.
std::string TruncateCsv(const std::string& text, int64_t iteration) {
  std::istringstream in(text);
  std::string line, out;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      out += line + '\n';
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (ParseNumber<int64_t>("iter", std::string_view(line).substr(0, comma)) <= iteration) out += line + '\n';
  }
  return out;
}

struct RunFiles {
  fs::path dir;
  fs::path manifest() const { return dir / "manifest.json"; }
  fs::path config() const { return dir / "config.txt"; }
  fs::path metrics() const { return dir / "metrics.csv"; }
  fs::path regimes() const { return dir / "regimes.csv"; }
  fs::path curves() const { return dir / "curves_final.csv"; }
  fs::path checkpoints() const { return dir / "checkpoints"; }
};

void WriteManifest(const RunFiles& files, const RunConfig& config, const TrainOptions& options,
                   const std::string& status, int64_t iteration, const std::string& error) {
  Json j;
  j["kind"] = "train";
  j["status"] = status;
  j["command"] = options.command;
  j["git"] = GitDescribe();
  j["config_hash"] = config.Hash();
  j["data_seed"] = config.data_seed;
  j["model_seed"] = config.model_seed;
  j["test_seed"] = config.test_seed;
  j["strict_deterministic"] = config.strict;
  j["iterations_completed"] = iteration;
  j["total_iterations"] = config.lr.total_iters;
  j["resumed_from"] = options.resume_from;
  j["files"] = {{"config", "config.txt"},
                {"metrics", "metrics.csv"},
                {"regimes", "regimes.csv"},
                {"curves_final", "curves_final.csv"},
                {"checkpoints", "checkpoints"}};
  j["config"] = config.ToText();
  if (!error.empty()) j["error"] = error;
  WriteFileAtomic(files.manifest().string(), j.dump(2) + "\n");
}

}  // namespace

SchedulePreset FindSchedulePreset(std::string_view name) {
  for (const auto& p : Presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown schedule preset: " + std::string(name));
}

std::vector<std::string> SchedulePresetNames() {
  std::vector<std::string> out;
  for (const auto& p : Presets()) out.push_back(p.name);
  return out;
}

std::string DefaultScheduleFor(Task main) {
  if (IsArithmetic(main)) return "arithmetic";
  if (IsString(main)) return "string";
  return "maze";
}

void RunConfig::Set(std::string_view key, std::string_view raw) {
  const std::string_view value = Trim(raw);
  auto i64 = [&] { return ParseNumber<int64_t>(key, value); };
  auto u64 = [&] { return ParseNumber<uint64_t>(key, value); };
  auto i32 = [&] { return ParseNumber<int>(key, value); };
  auto f64 = [&] { return ParseNumber<double>(key, value); };
  try {
    if (key == "group") {
      group = BuiltinGroup(value);
    } else if (key == "member") {
      group.members.push_back(ParseTaskGroup("member = " + std::string(value)).members.front());
    } else if (key == "name") {
      group.name = std::string(value);
    } else if (key == "task_draw") {
      if (value != "per_example" && value != "per_batch") throw ConfigError("task_draw must be per_example or per_batch");
      group.per_batch_task = value == "per_batch";
    } else if (key == "mqar_query_width") {
      group.options.mqar.query_width = i32();
    } else if (key == "mqar_num_queries") {
      group.options.mqar.num_queries = i32();
    } else if (key == "schedule") {
      const SchedulePreset p = FindSchedulePreset(value);
      schedule = p.name;
      batch_size = p.batch_size;
      lr = p.lr;
    } else if (key == "batch_size") {
      batch_size = i32();
    } else if (key == "lr") {
      lr.peak_lr = f64();
    } else if (key == "iterations") {
      lr.total_iters = i64();
    } else if (key == "warmup") {
      lr.warmup_iters = i64();
    } else if (key == "decay") {
      lr.decay_iters = i64();
    } else if (key == "beta1") {
      adamw.beta1 = f64();
    } else if (key == "beta2") {
      adamw.beta2 = f64();
    } else if (key == "adam_eps") {
      adamw.eps = f64();
    } else if (key == "weight_decay") {
      adamw.weight_decay = f64();
    } else if (key == "grad_clip") {
      grad_clip = f64();
    } else if (key == "layers") {
      model.layers = i32();
    } else if (key == "heads") {
      model.heads = i32();
    } else if (key == "embed_dim") {
      model.embed_dim = i32();
    } else if (key == "mlp_hidden") {
      model.mlp_hidden = i32();
    } else if (key == "max_seq_len") {
      model.max_seq_len = i32();
    } else if (key == "position") {
      model.position = PositionModeFromName(value);
    } else if (key == "rope_base") {
      model.rope_base = f64();
    } else if (key == "data_seed") {
      data_seed = u64();
    } else if (key == "model_seed") {
      model_seed = u64();
    } else if (key == "checkpoint_every") {
      checkpoint_every = i64();
    } else if (key == "eval_every") {
      eval_every = i64();
    } else if (key == "eval_examples") {
      eval_examples = i32();
    } else if (key == "final_eval_examples") {
      final_eval_examples = i32();
    } else if (key == "test_seed") {
      test_seed = u64();
    } else if (key == "eval_lengths") {
      eval_lengths = value == "default" ? std::vector<int>{} : ParseLengths(value);
    } else if (key == "semantic_eval") {
      semantic_eval = ParseBool(key, value);
    } else if (key == "max_context") {
      max_context = i32();
    } else if (key == "strict") {
      strict = ParseBool(key, value);
    } else if (key == "threads") {
      threads = i32();
    } else {
      throw ConfigError("unknown config key: " + std::string(key));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

RunConfig RunConfig::Parse(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> settings;
  std::string group_text;
  std::string schedule_name;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string value(Trim(line.substr(eq + 1)));
    if (GroupKeys().count(key)) {
      group_text += std::string(line) + '\n';
    } else if (key == "schedule") {
      schedule_name = value;
    } else {
      settings.emplace_back(key, value);
    }
  }
  if (group_text.empty()) throw ConfigError("config defines no task group");
  RunConfig c;
  try {
    c.group = ParseTaskGroup(group_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("task group: ") + e.what());
  }
  c.Set("schedule", schedule_name.empty() ? DefaultScheduleFor(c.group.Main().task) : schedule_name);
  for (const auto& [k, v] : settings) c.Set(k, v);
  c.Validate();
  return c;
}

std::string RunConfig::ToText() const {
  std::ostringstream o;
  if (!group.name.empty()) o << "name = " << group.name << '\n';
  o << "task_draw = " << (group.per_batch_task ? "per_batch" : "per_example") << '\n';
  o << "mqar_query_width = " << group.options.mqar.query_width << '\n';
  o << "mqar_num_queries = " << group.options.mqar.num_queries << '\n';
  for (const auto& m : group.members) {
    o << "member = " << TaskName(m.task) << ' ' << m.min_length << ' ' << m.max_length << ' ' << RoleName(m.role)
      << '\n';
  }
  o << "layers = " << model.layers << '\n';
  o << "heads = " << model.heads << '\n';
  o << "embed_dim = " << model.embed_dim << '\n';
  o << "mlp_hidden = " << model.mlp_hidden << '\n';
  o << "max_seq_len = " << model.max_seq_len << '\n';
  o << "position = " << PositionModeName(model.position) << '\n';
  o << "rope_base = " << FormatDouble(model.rope_base) << '\n';
  o << "schedule = " << schedule << '\n';
  o << "batch_size = " << batch_size << '\n';
  o << "lr = " << FormatDouble(lr.peak_lr) << '\n';
  o << "iterations = " << lr.total_iters << '\n';
  o << "warmup = " << lr.warmup_iters << '\n';
  o << "decay = " << lr.decay_iters << '\n';
  o << "beta1 = " << FormatDouble(adamw.beta1) << '\n';
  o << "beta2 = " << FormatDouble(adamw.beta2) << '\n';
  o << "adam_eps = " << FormatDouble(adamw.eps) << '\n';
  o << "weight_decay = " << FormatDouble(adamw.weight_decay) << '\n';
  o << "grad_clip = " << FormatDouble(grad_clip) << '\n';
  o << "data_seed = " << data_seed << '\n';
  o << "model_seed = " << model_seed << '\n';
  o << "checkpoint_every = " << checkpoint_every << '\n';
  o << "eval_every = " << eval_every << '\n';
  o << "eval_examples = " << eval_examples << '\n';
  o << "final_eval_examples = " << final_eval_examples << '\n';
  o << "test_seed = " << test_seed << '\n';
  o << "eval_lengths = " << (eval_lengths.empty() ? "default" : JoinLengths(eval_lengths)) << '\n';
  o << "semantic_eval = " << (semantic_eval ? "true" : "false") << '\n';
  o << "max_context = " << max_context << '\n';
  o << "strict = " << (strict ? "true" : "false") << '\n';
  o << "threads = " << threads << '\n';
  return o.str();
}

std::string RunConfig::Hash() const {
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << Fnv1a(ToText());
  return o.str();
}

void RunConfig::Validate() const {
  try {
    group.Validate();
    model.Validate();
    lr.Validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (model.vocab_size != Vocab::Get().size()) throw ConfigError("vocab_size must match the vocabulary");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be positive");
  if (eval_every < 0) throw ConfigError("eval_every must be >= 0");
  if (eval_examples < 1 || final_eval_examples < 1) throw ConfigError("eval example counts must be positive");
  if (grad_clip < 0) throw ConfigError("grad_clip must be >= 0");
  if (max_context < 2) throw ConfigError("max_context too small");
  for (const auto& m : group.members) {
    if (m.min_length < MinLength(m.task, group.options) || m.max_length < m.min_length) {
      throw ConfigError("bad length range for " + std::string(TaskName(m.task)));
    }
  }
}

std::vector<int> RunConfig::EvalLengthsFor(Task task) const {
  const std::vector<int> base = eval_lengths.empty() ? DefaultGapLengths(group) : eval_lengths;
  const int lo = MinLength(task, group.options);
  const int hi = IsMaze(task) ? kGridSide * kGridSide : std::numeric_limits<int>::max();
  std::vector<int> out;
  for (int len : base) {
    if (len >= lo && len <= hi) out.push_back(len);
  }
  return out;
}

EvalOptions RunConfig::MakeEvalOptions(int examples) const {
  EvalOptions o;
  o.examples = examples;
  o.seed = test_seed;
  o.max_context = max_context;
  o.task_options = group.options;
  return o;
}

std::vector<RegimeAccuracy> SummarizeRegimes(const TaskGroup& group, std::span<const AccuracyCurve> curves) {
  const int main_max = group.Main().max_length;
  int aux_max = 0;
  for (const auto& m : group.members) {
    if (m.role == Role::kAuxiliary) aux_max = std::max(aux_max, m.max_length);
  }
  const int top = std::max(main_max, aux_max);
  std::vector<RegimeAccuracy> out;
  for (const auto& c : curves) {
    RegimeAccuracy in{c.task, "in", 0, 0}, transfer{c.task, "transfer", 0, 0}, beyond{c.task, "beyond", 0, 0};
    for (const auto& p : c.points) {
      RegimeAccuracy& r = p.length <= main_max ? in : p.length <= top ? transfer : beyond;
      r.accuracy += p.accuracy;
      ++r.lengths;
    }
    for (RegimeAccuracy* r : {&in, &transfer, &beyond}) {
      if (r->lengths == 0) continue;
      r->accuracy /= r->lengths;
      out.push_back(*r);
    }
  }
  return out;
}

void WriteFileAtomic(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string GitDescribe() { return LENXFER_GIT_DESCRIBE; }

TrainResult TrainRun(const RunConfig& config, const std::string& out_dir, const TrainOptions& options) {
  config.Validate();
  SetNumThreads(config.strict ? 1 : config.threads);
  const RunFiles files{fs::path(out_dir)};
  fs::create_directories(files.checkpoints());
  const std::string config_text = config.ToText();

  Checkpoint state;
  std::string metrics = "iter,task,length,accuracy,loss\n";
  std::string regimes = "iter,task,regime,accuracy\n";
  if (!options.resume_from.empty()) {
    state = LoadCheckpoint(options.resume_from);
    if (state.run_config != config_text) {
      throw ConfigError("checkpoint " + options.resume_from + " was written under a different run config");
    }
    if (fs::exists(files.metrics())) metrics = TruncateCsv(ReadFile(files.metrics().string()), state.iteration);
    if (fs::exists(files.regimes())) regimes = TruncateCsv(ReadFile(files.regimes().string()), state.iteration);
  } else {
    state.data_seed = config.data_seed;
    state.model_seed = config.model_seed;
    state.run_config = config_text;
    state.params = InitParams<float>(config.model, config.model_seed);
    state.optimizer = OptimizerState<float>::Init(config.model, config.adamw);
  }
  WriteFileAtomic(files.config().string(), config_text);
  WriteFileAtomic(files.metrics().string(), metrics);
  WriteFileAtomic(files.regimes().string(), regimes);
  WriteManifest(files, config, options, "running", state.iteration, "");

  const DataStream stream(config.group, config.data_seed, config.batch_size);
  const int64_t total = config.lr.total_iters;
  const int64_t end = options.stop_at >= 0 ? std::min(options.stop_at, total) : total;
  TrainResult result;
  try {
    while (state.iteration < end) {
      const int64_t it = state.iteration;
      const Batch batch = stream.BatchAt(it);
      auto lg = LossAndGradients(state.params, batch);
      if (!std::isfinite(lg.loss)) {
        throw NonFiniteLoss("non-finite training loss at iteration " + std::to_string(it) + " (data seed " +
                            std::to_string(config.data_seed) + ", model seed " + std::to_string(config.model_seed) +
                            ")");
      }
      ClipGradNorm(lg.grads, config.grad_clip);
      AdamWStep(state.params, lg.grads, state.optimizer, config.lr.At(it));
      state.iteration = it + 1;
      state.loss_sum += lg.loss;
      ++state.loss_count;
      result.last_loss = lg.loss;

      const int64_t done = state.iteration;
      const bool final = done == total;
      if (final || (config.eval_every > 0 && done % config.eval_every == 0)) {
        const EvalOptions eval = config.MakeEvalOptions(final ? config.final_eval_examples : config.eval_examples);
        EvalOptions final_eval = eval;
        final_eval.semantic = config.semantic_eval;
        const LogitFn model = ModelLogits(state.params);
        std::vector<AccuracyCurve> curves;
        std::set<Task> seen;
        for (const auto& m : config.group.members) {
          if (!seen.insert(m.task).second) continue;
          const auto lengths = config.EvalLengthsFor(m.task);
          curves.push_back(ComputeAccuracyCurve(model, m.task, lengths, final ? final_eval : eval, done));
        }
        const double loss = state.loss_sum / static_cast<double>(std::max<int64_t>(1, state.loss_count));
        std::ostringstream rows;
        rows << std::setprecision(17);
        for (const auto& c : curves) {
          for (const auto& p : c.points) {
            rows << done << ',' << TaskName(c.task) << ',' << p.length << ',' << p.accuracy << ',' << loss << '\n';
          }
        }
        metrics += rows.str();
        std::ostringstream reg;
        reg << std::setprecision(17);
        std::string summary;
        for (const auto& r : SummarizeRegimes(config.group, curves)) {
          reg << done << ',' << TaskName(r.task) << ',' << r.regime << ',' << r.accuracy << '\n';
          std::ostringstream s;
          s << ' ' << TaskName(r.task) << '.' << r.regime << '=' << std::fixed << std::setprecision(3) << r.accuracy;
          summary += s.str();
        }
        regimes += reg.str();
        WriteFileAtomic(files.metrics().string(), metrics);
        WriteFileAtomic(files.regimes().string(), regimes);
        state.loss_sum = 0;
        state.loss_count = 0;
        if (final) {
          std::ostringstream cs;
          cs << std::setprecision(17);
          WriteCurveCsv(cs, curves);
          WriteFileAtomic(files.curves().string(), cs.str());
          result.final_curves = curves;
        }
        if (options.log) {
          std::ostringstream s;
          s << "iter " << done << " loss " << std::setprecision(6) << loss << summary;
          options.log(s.str());
        }
      }
      if (final || done == end || done % config.checkpoint_every == 0) {
        const std::string path = (files.checkpoints() / CheckpointFileName(done)).string();
        SaveCheckpoint(state, path);
        result.checkpoints.push_back(path);
      }
    }
  } catch (const std::exception& e) {
    WriteManifest(files, config, options, "failed", state.iteration, e.what());
    throw;
  }
  result.iterations = state.iteration;
  result.finished = state.iteration == total;
  if (result.finished && result.final_curves.empty() && fs::exists(files.curves())) {
    result.final_curves = ReadCurveCsv(ReadFile(files.curves().string()));
  }
  WriteManifest(files, config, options, result.finished ? "complete" : "stopped", state.iteration, "");
  return result;
}

std::vector<AccuracyCurve> ReadCurveCsv(std::string_view text) {
  std::vector<AccuracyCurve> out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (Trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() < 5) throw std::invalid_argument("bad curve row: " + line);
    const Task task = TaskFromName(f[0]);
    const auto iter = ParseNumber<int64_t>("iter", f[1]);
    if (out.empty() || out.back().task != task || out.back().iteration != iter) {
      out.push_back(AccuracyCurve{task, iter, {}});
    }
    CurvePoint p;
    p.length = ParseNumber<int>("length", f[2]);
    p.examples = ParseNumber<int>("n", f[3]);
    p.accuracy = std::stod(f[4]);
    if (f.size() > 5 && !f[5].empty()) p.semantic = std::stod(f[5]);
    out.back().points.push_back(p);
  }
  return out;
}

std::string SweepCell::DirName() const {
  return "main" + std::to_string(main_length) + "_aux" + std::to_string(aux_length) + "_seed" + std::to_string(seed);
}

std::vector<SweepCell> PlanSweep(const SweepOptions& options) {
  std::vector<SweepCell> out;
  for (int m : options.lengths) {
    for (int a : options.lengths) {
      for (uint64_t s : options.seeds) out.push_back({m, a, s});
    }
  }
  return out;
}

double RunGap(const RunConfig& config, std::span<const AccuracyCurve> curves) {
  const Task main = config.group.Main().task;
  const GroupMember* aux = nullptr;
  for (const auto& m : config.group.members) {
    if (m.role == Role::kAuxiliary) {
      aux = &m;
      break;
    }
  }
  if (!aux) throw ConfigError("group has no auxiliary task");
  const auto main_lengths = config.EvalLengthsFor(main);
  const auto aux_lengths = config.EvalLengthsFor(aux->task);
  std::vector<int> lengths;
  std::set_intersection(main_lengths.begin(), main_lengths.end(), aux_lengths.begin(), aux_lengths.end(),
                        std::back_inserter(lengths));
  const AccuracyCurve* cm = nullptr;
  const AccuracyCurve* ca = nullptr;
  for (const auto& c : curves) {
    if (c.task == main) cm = &c;
    if (c.task == aux->task) ca = &c;
  }
  if (!cm || !ca) throw MissingLength("final curves lack the main or auxiliary task");
  return GeneralizationGap(*cm, *ca, lengths);
}

std::vector<SweepResult> RunSweep(const RunConfig& base, const std::string& out_dir, const SweepOptions& options,
                                  const TrainOptions& train_options) {
  const auto cells = PlanSweep(options);
  std::vector<SweepResult> results(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<size_t> next{0};
  std::mutex log_mu;
  fs::create_directories(out_dir);

  auto work = [&] {
    for (size_t i = next++; i < cells.size(); i = next++) {
      try {
        const SweepCell& cell = cells[i];
        RunConfig cfg = base;
        cfg.group = WithTrainLengths(base.group, cell.main_length, cell.aux_length);
        cfg.model_seed = cell.seed;
        const fs::path dir = fs::path(out_dir) / cell.DirName();
        std::vector<AccuracyCurve> curves;
        bool reused = false;
        if (fs::exists(dir / "manifest.json")) {
          const Json m = Json::parse(ReadFile((dir / "manifest.json").string()));
          if (m.value("status", "") == "complete" && m.value("config_hash", "") == cfg.Hash()) {
            curves = ReadCurveCsv(ReadFile((dir / "curves_final.csv").string()));
            reused = true;
          }
        }
        if (!reused) {
          TrainOptions opts = train_options;
          opts.resume_from.clear();
          opts.stop_at = -1;
          if (train_options.log) {
            opts.log = [&, name = cell.DirName()](const std::string& s) {
              const std::lock_guard<std::mutex> lock(log_mu);
              train_options.log(name + ": " + s);
            };
          }
          curves = TrainRun(cfg, dir.string(), opts).final_curves;
        }
        results[i] = {cell, RunGap(cfg, curves)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::ostringstream gap;
  gap << std::setprecision(17) << "main_len,aux_len,seed,gap\n";
  for (const auto& r : results) {
    gap << r.cell.main_length << ',' << r.cell.aux_length << ',' << r.cell.seed << ',' << r.gap << '\n';
  }
  WriteFileAtomic((fs::path(out_dir) / "gap.csv").string(), gap.str());
  return results;
}

int MergeReports(const std::string& root, const std::string& out_dir) {
  std::map<std::string, fs::path> runs;
  std::vector<fs::path> gaps;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.filename() == "gap.csv") gaps.push_back(p);
    if (p.filename() != "manifest.json") continue;
    const Json m = Json::parse(ReadFile(p.string()));
    if (m.value("kind", "") != "train" || m.value("status", "") != "complete") continue;
    runs[fs::relative(p.parent_path(), root).generic_string()] = p.parent_path();
  }
  std::sort(gaps.begin(), gaps.end());

  std::ostringstream curves_out, regimes_out;
  curves_out << std::setprecision(17) << "run,task,iter,length,n,exact_match,semantic_match\n";
  regimes_out << std::setprecision(17) << "run,task,regime,accuracy,lengths\n";
  for (const auto& [name, dir] : runs) {
    const RunConfig cfg = RunConfig::Parse(ReadFile((dir / "config.txt").string()));
    const auto curves = ReadCurveCsv(ReadFile((dir / "curves_final.csv").string()));
    for (const auto& c : curves) {
      for (const auto& p : c.points) {
        curves_out << name << ',' << TaskName(c.task) << ',' << c.iteration << ',' << p.length << ',' << p.examples
                   << ',' << p.accuracy << ',';
        if (p.semantic) curves_out << *p.semantic;
        curves_out << '\n';
      }
    }
    for (const auto& r : SummarizeRegimes(cfg.group, curves)) {
      regimes_out << name << ',' << TaskName(r.task) << ',' << r.regime << ',' << r.accuracy << ',' << r.lengths
                  << '\n';
    }
  }
  fs::create_directories(out_dir);
  WriteFileAtomic((fs::path(out_dir) / "summary_curves.csv").string(), curves_out.str());
  WriteFileAtomic((fs::path(out_dir) / "summary_regimes.csv").string(), regimes_out.str());
  if (!gaps.empty()) {
    std::ostringstream gap_out;
    gap_out << "sweep,main_len,aux_len,seed,gap\n";
    for (const auto& g : gaps) {
      const std::string sweep = fs::relative(g.parent_path(), root).generic_string();
      std::istringstream in(ReadFile(g.string()));
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        if (!line.empty()) gap_out << sweep << ',' << line << '\n';
      }
    }
    WriteFileAtomic((fs::path(out_dir) / "summary_gap.csv").string(), gap_out.str());
  }
  return static_cast<int>(runs.size());
}

}  // namespace lenxfer
