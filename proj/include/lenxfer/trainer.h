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

#ifndef LENXFER_TRAINER_H_
#define LENXFER_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lenxfer/eval.h"
#include "lenxfer/model.h"
#include "lenxfer/optim.h"
#include "lenxfer/sampler.h"

namespace lenxfer {

class NonFiniteLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SchedulePreset {
  std::string name;
  int batch_size = 0;
  LrSchedule lr;
};

// arithmetic, string, maze, and the *_smollm variants.
SchedulePreset FindSchedulePreset(std::string_view name);
std::vector<std::string> SchedulePresetNames();
// Preset matching the main task's domain.
std::string DefaultScheduleFor(Task main);

struct RunConfig {
  TaskGroup group;
  ModelConfig model;
  std::string schedule = "arithmetic";
  int batch_size = 1024;
  LrSchedule lr;
  AdamWConfig adamw;
  // Global gradient-norm cap; 0 disables clipping.
  double grad_clip = 1.0;
  uint64_t data_seed = 0;
  uint64_t model_seed = 0;
  int64_t checkpoint_every = 1000;
  int64_t eval_every = 500;
  int eval_examples = 256;
  int final_eval_examples = 1024;
  uint64_t test_seed = 1234;
  // Empty selects 1 .. longest auxiliary training length + 4.
  std::vector<int> eval_lengths;
  bool semantic_eval = false;
  int max_context = 1024;
  bool strict = false;
  int threads = 0;

  // "key = value" lines. Group keys (group, member, name, task_draw,
  // mqar_*) build the task group; `schedule` applies its preset before any
  // explicit batch_size / lr / iterations / warmup / decay. Unknown keys
  // throw ConfigError.
  static RunConfig Parse(std::string_view text);
  // Single-key override with the same semantics as a config line. `group`
  // replaces the whole task group with a built-in one.
  void Set(std::string_view key, std::string_view value);

  // Every key, fixed order; Parse(ToText()) reproduces the config.
  std::string ToText() const;
  // 16 hex digits of FNV-1a 64 over ToText().
  std::string Hash() const;
  void Validate() const;

  // Eval lengths restricted to those the task can generate.
  std::vector<int> EvalLengthsFor(Task task) const;
  EvalOptions MakeEvalOptions(int examples) const;
};

// Accuracy averaged over one length regime, relative to the main task's
// training maximum M and the longest auxiliary maximum A: in (len <= M),
// transfer (M < len <= A) and beyond (len > max(M, A)).
struct RegimeAccuracy {
  Task task = Task::kReverseAdd;
  std::string regime;
  double accuracy = 0;
  int lengths = 0;
};

std::vector<RegimeAccuracy> SummarizeRegimes(const TaskGroup& group, std::span<const AccuracyCurve> curves);

struct TrainOptions {
  // Checkpoint to continue from; its run config must hash equal.
  std::string resume_from;
  // Stop (with a checkpoint) after this many iterations; < 0 runs to the end.
  int64_t stop_at = -1;
  // Recorded in the manifest.
  std::string command;
  std::function<void(const std::string&)> log;
};

struct TrainResult {
  int64_t iterations = 0;
  bool finished = false;
  std::vector<AccuracyCurve> final_curves;
  std::vector<std::string> checkpoints;
  double last_loss = 0;
};

// Writes into out_dir:
//   manifest.json          config, seeds, git describe, files, status
//   config.txt             canonical run config
//   metrics.csv            iter,task,length,accuracy,loss
//   regimes.csv            iter,task,regime,accuracy
//   checkpoints/ckpt_*.bin
//   curves_final.csv       full-size evaluation at the last iteration
// Throws NonFiniteLoss on a NaN or infinite training loss.
TrainResult TrainRun(const RunConfig& config, const std::string& out_dir, const TrainOptions& options = {});

// Writes via a sibling temporary file and rename.
void WriteFileAtomic(const std::string& path, std::string_view contents);
std::string ReadFile(const std::string& path);
std::string GitDescribe();

struct SweepCell {
  int main_length = 0;
  int aux_length = 0;
  uint64_t seed = 0;

  std::string DirName() const;
};

struct SweepOptions {
  std::vector<int> lengths = {4, 8, 16, 32, 64, 128, 256};
  std::vector<uint64_t> seeds = {0, 1, 2};
  int jobs = 1;
};

// Every (main length, aux length, model seed) combination.
std::vector<SweepCell> PlanSweep(const SweepOptions& options);

struct SweepResult {
  SweepCell cell;
  double gap = 0;
};

// One training run per cell under out_dir/<cell dir>; the data seed stays
// fixed and the model seed varies. Completed cells are reused. Writes
// out_dir/gap.csv (main_len,aux_len,seed,gap).
std::vector<SweepResult> RunSweep(const RunConfig& base, const std::string& out_dir, const SweepOptions& options,
                                  const TrainOptions& train_options = {});

// Gap between the main task and the first auxiliary member, over the
// config's eval lengths valid for both.
double RunGap(const RunConfig& config, std::span<const AccuracyCurve> curves);

// Collects every completed run below `root` into out_dir:
// summary_curves.csv, summary_regimes.csv and, when present, summary_gap.csv.
// Returns the number of runs merged.
int MergeReports(const std::string& root, const std::string& out_dir);

std::vector<AccuracyCurve> ReadCurveCsv(std::string_view text);

}  // namespace lenxfer

#endif  // LENXFER_TRAINER_H_
