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

#ifndef LENXFER_MECH_H_
#define LENXFER_MECH_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lenxfer/eval.h"
#include "lenxfer/model.h"

namespace lenxfer {

class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// layers x heads grid of scalars.
struct HeadGrid {
  int layers = 0;
  int heads = 0;
  std::vector<double> values;

  HeadGrid() = default;
  HeadGrid(int l, int h) : layers(l), heads(h), values(static_cast<size_t>(l * h), 0.0) {}
  double& at(int l, int h) { return values[static_cast<size_t>(l * heads + h)]; }
  double at(int l, int h) const { return values[static_cast<size_t>(l * heads + h)]; }
};

// Softmax attention weights, indexed layer * heads + head, each
// (rows * width) x width.
std::vector<Matrix<float>> CaptureAttention(const ModelParams<float>& params, const Batch& batch);

struct AttentionDiff {
  HeadGrid per_head;
  double total = 0;
};

// Per head: sum of |A_ij - B_ij| over the prefix both rows share, then
// averaged (or summed) over batch rows. Total sums the heads. Throws
// ShapeMismatch when the batches differ in row count.
AttentionDiff AttentionDiffFromCaptures(const std::vector<Matrix<float>>& a, const Batch& batch_a,
                                        const std::vector<Matrix<float>>& b, const Batch& batch_b, int layers,
                                        int heads, bool average_rows = true);

AttentionDiff AttentionMatrixDiff(const ModelParams<float>& params, const Batch& a, const Batch& b,
                                  bool average_rows = true);

// Two tasks' test sets at the same length parameter, row-paired.
AttentionDiff TaskAttentionDiff(const ModelParams<float>& params, Task task_a, Task task_b, int length,
                                const EvalOptions& options, bool average_rows = true);

struct AblationMap {
  Task task = Task::kReverseAdd;
  int length = 0;
  int64_t iteration = 0;
  double baseline = 0;
  // baseline accuracy minus accuracy with that head mean-ablated.
  HeadGrid drop;
};

// Each head in turn has its output at every position replaced with the
// mean of that head's output at the same position across the test set.
AblationMap MeanAblationMap(const ModelParams<float>& params, Task task, int length, const EvalOptions& options,
                            int64_t iteration = 0);

// Mean absolute entry-wise difference. Throws ShapeMismatch.
double AblationMapDiff(const HeadGrid& a, const HeadGrid& b);
double AblationMapDiff(const AblationMap& a, const AblationMap& b);

// Pearson correlation; absent for fewer than two points or zero variance.
std::optional<double> Pearson(std::span<const double> x, std::span<const double> y);

struct CircuitPoint {
  int64_t iteration = 0;
  double gap = 0;
  double attention_diff = 0;
  double ablation_diff = 0;
};

struct CircuitSeries {
  std::vector<CircuitPoint> points;
  std::optional<double> attention_correlation;
  std::optional<double> ablation_correlation;

  // Recomputes both correlations against the gap.
  void Correlate();
};

struct CircuitOptions {
  std::vector<int> gap_lengths;
  // Length at which attention and ablation maps are compared.
  int analysis_length = 8;
  EvalOptions gap_eval;
  EvalOptions analysis_eval;
  bool average_rows = true;
};

struct CircuitCheckpoint {
  int64_t iteration = 0;
  ModelParams<float> params;
};

CircuitSeries ComputeCircuitSeries(std::span<const CircuitCheckpoint> checkpoints, Task main, Task aux,
                                   const CircuitOptions& options);

// CSV grid: header "layer,head0,head1,...", one row per layer.
void WriteAblationCsv(std::ostream& out, const AblationMap& map);
// Long format: iter,metric,value. Correlations appear with iter = -1.
void WriteSeriesCsv(std::ostream& out, const CircuitSeries& series);

}  // namespace lenxfer

#endif  // LENXFER_MECH_H_
