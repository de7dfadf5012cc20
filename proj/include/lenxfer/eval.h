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

#ifndef LENXFER_EVAL_H_
#define LENXFER_EVAL_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lenxfer/instance.h"
#include "lenxfer/model.h"
#include "lenxfer/sampler.h"

namespace lenxfer {

class ContextOverflow : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MissingLength : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Anything that maps a batch to next-token logits, (rows * width) x vocab.
// Lets tests substitute oracle or random predictors for a trained model.
using LogitFn = std::function<Matrix<float>(const Batch&)>;

// The returned function holds a reference to `params`.
LogitFn ModelLogits(const ModelParams<float>& params);

// Index of the largest entry; ties go to the lowest index.
int ArgmaxLowest(const Eigen::Ref<const Eigen::Matrix<float, 1, Eigen::Dynamic>>& row);

// Per-row exact match under teacher forcing: every masked token equals the
// argmax prediction from the previous position. For targets ending in <eos>
// this is the same verdict greedy decoding gives, in one forward pass.
std::vector<uint8_t> TeacherForcedExactMatch(const Matrix<float>& logits, const Batch& batch);

// Argmax decoding of up to max_new_tokens after `prompt`; stops after
// emitting <eos>. Throws ContextOverflow when the prompt alone does not fit.
std::vector<int> GreedyDecode(const LogitFn& model, std::span<const int> prompt, int max_new_tokens,
                              int max_context, const Vocab& vocab = Vocab::Get());

// Batched variant; one output per prompt.
std::vector<std::vector<int>> GreedyDecodeBatch(const LogitFn& model,
                                                const std::vector<std::vector<int>>& prompts,
                                                int max_new_tokens, int max_context,
                                                const Vocab& vocab = Vocab::Get());

struct EvalOptions {
  int examples = 1024;
  uint64_t seed = 1234;
  int chunk = 128;
  // DFS traces: additionally decode freely and score with the trace checker.
  bool semantic = false;
  int max_context = 1024;
  TaskOptions task_options;
};

std::vector<Sample> BuildTestSet(Task task, int length, const EvalOptions& options);

struct CurvePoint {
  int length = 0;
  double accuracy = 0;
  int examples = 0;
  std::optional<double> semantic;
};

struct AccuracyCurve {
  Task task = Task::kReverseAdd;
  int64_t iteration = 0;
  std::vector<CurvePoint> points;

  // Throws MissingLength.
  double At(int length) const;
};

CurvePoint EvaluateLength(const LogitFn& model, Task task, int length, const EvalOptions& options);

double AccuracyAtLength(const LogitFn& model, Task task, int length, const EvalOptions& options);

// Lengths must be strictly increasing.
AccuracyCurve ComputeAccuracyCurve(const LogitFn& model, Task task, std::span<const int> lengths,
                                   const EvalOptions& options, int64_t iteration = 0);

enum class GapMode { kClamped, kAbsolute };

// Mean over `lengths` of clamp(aux - main, 0, 1); kAbsolute uses |aux - main|.
double GeneralizationGap(const AccuracyCurve& main, const AccuracyCurve& aux, std::span<const int> lengths,
                         GapMode mode = GapMode::kClamped);

// 1 .. (longest auxiliary training length + 4).
std::vector<int> DefaultGapLengths(const TaskGroup& group);

// Inclusive "a:b" ranges and single values, comma separated: "1:8,12,16".
std::vector<int> ParseLengths(std::string_view spec);

// CSV columns: task,iter,length,n,exact_match,semantic_match
void WriteCurveCsv(std::ostream& out, std::span<const AccuracyCurve> curves, bool header = true);

// Number of test inputs at (task, length) that also occur among the first
// `iterations` batches of the training stream.
int64_t CountTrainTestCollisions(const DataStream& stream, int64_t iterations, Task task, int length,
                                 const EvalOptions& options);

}  // namespace lenxfer

#endif  // LENXFER_EVAL_H_
