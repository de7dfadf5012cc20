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

#include "lenxfer/mech.h"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace lenxfer {
namespace {

using MatrixD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<Batch> Chunked(const std::vector<Sample>& samples, int chunk) {
  std::vector<Batch> out;
  const auto step = static_cast<size_t>(std::max(1, chunk));
  for (size_t begin = 0; begin < samples.size(); begin += step) {
    const size_t end = std::min(samples.size(), begin + step);
    out.push_back(MakeBatch(std::span<const Sample>(samples.data() + begin, end - begin)));
  }
  return out;
}

int64_t CountCorrect(const ModelParams<float>& params, const std::vector<Batch>& batches,
                     const HeadPatch<float>* patch) {
  ForwardOptions<float> opts;
  opts.patch = patch;
  int64_t correct = 0;
  for (const auto& b : batches) {
    for (uint8_t ok : TeacherForcedExactMatch(Forward(params, b, opts).logits, b)) correct += ok;
  }
  return correct;
}

}  // namespace

std::vector<Matrix<float>> CaptureAttention(const ModelParams<float>& params, const Batch& batch) {
  ForwardOptions<float> opts;
  opts.capture_attention = true;
  return Forward(params, batch, opts).attention;
}

AttentionDiff AttentionDiffFromCaptures(const std::vector<Matrix<float>>& a, const Batch& batch_a,
                                        const std::vector<Matrix<float>>& b, const Batch& batch_b, int layers,
                                        int heads, bool average_rows) {
  if (batch_a.rows != batch_b.rows) throw ShapeMismatch("attention batches differ in row count");
  const auto expected = static_cast<size_t>(layers * heads);
  if (a.size() != expected || b.size() != expected) throw ShapeMismatch("attention captures differ in head count");
  AttentionDiff out;
  out.per_head = HeadGrid(layers, heads);
  for (int l = 0; l < layers; ++l) {
    for (int h = 0; h < heads; ++h) {
      const auto& ma = a[static_cast<size_t>(l * heads + h)];
      const auto& mb = b[static_cast<size_t>(l * heads + h)];
      double sum = 0;
      for (int r = 0; r < batch_a.rows; ++r) {
        const int len = std::min(batch_a.seq_lens[static_cast<size_t>(r)], batch_b.seq_lens[static_cast<size_t>(r)]);
        const auto ra = static_cast<Eigen::Index>(r) * batch_a.width;
        const auto rb = static_cast<Eigen::Index>(r) * batch_b.width;
        for (int i = 0; i < len; ++i) {
          for (int j = 0; j <= i; ++j) {
            sum += std::abs(static_cast<double>(ma(ra + i, j)) - static_cast<double>(mb(rb + i, j)));
          }
        }
      }
      if (average_rows && batch_a.rows > 0) sum /= batch_a.rows;
      out.per_head.at(l, h) = sum;
      out.total += sum;
    }
  }
  return out;
}

AttentionDiff AttentionMatrixDiff(const ModelParams<float>& params, const Batch& a, const Batch& b,
                                  bool average_rows) {
  if (a.rows != b.rows) throw ShapeMismatch("attention batches differ in row count");
  return AttentionDiffFromCaptures(CaptureAttention(params, a), a, CaptureAttention(params, b), b,
                                   params.config.layers, params.config.heads, average_rows);
}

AttentionDiff TaskAttentionDiff(const ModelParams<float>& params, Task task_a, Task task_b, int length,
                                const EvalOptions& options, bool average_rows) {
  const auto sa = BuildTestSet(task_a, length, options);
  const auto sb = BuildTestSet(task_b, length, options);
  const int layers = params.config.layers, heads = params.config.heads;
  AttentionDiff total;
  total.per_head = HeadGrid(layers, heads);
  const auto step = static_cast<size_t>(std::max(1, options.chunk));
  for (size_t begin = 0; begin < sa.size(); begin += step) {
    const size_t end = std::min(sa.size(), begin + step);
    const Batch ba = MakeBatch(std::span<const Sample>(sa.data() + begin, end - begin));
    const Batch bb = MakeBatch(std::span<const Sample>(sb.data() + begin, end - begin));
    const AttentionDiff part = AttentionMatrixDiff(params, ba, bb, false);
    for (size_t i = 0; i < total.per_head.values.size(); ++i) total.per_head.values[i] += part.per_head.values[i];
  }
  if (average_rows && !sa.empty()) {
    for (double& v : total.per_head.values) v /= static_cast<double>(sa.size());
  }
  for (double v : total.per_head.values) total.total += v;
  return total;
}

AblationMap MeanAblationMap(const ModelParams<float>& params, Task task, int length, const EvalOptions& options,
                            int64_t iteration) {
  const ModelConfig& cfg = params.config;
  const int hd = cfg.HeadDim();
  const auto samples = BuildTestSet(task, length, options);
  AblationMap map;
  map.task = task;
  map.length = length;
  map.iteration = iteration;
  map.drop = HeadGrid(cfg.layers, cfg.heads);
  if (samples.empty()) return map;
  const auto batches = Chunked(samples, options.chunk);

  int width = 0;
  for (const auto& b : batches) width = std::max(width, b.width);
  std::vector<MatrixD> sums(static_cast<size_t>(cfg.layers), MatrixD::Zero(width, cfg.embed_dim));
  std::vector<int64_t> counts(static_cast<size_t>(width), 0);
  int64_t baseline_correct = 0;
  ForwardOptions<float> capture;
  capture.capture_head_outputs = true;
  for (const auto& b : batches) {
    const auto fwd = Forward(params, b, capture);
    for (uint8_t ok : TeacherForcedExactMatch(fwd.logits, b)) baseline_correct += ok;
    for (int r = 0; r < b.rows; ++r) {
      const int len = b.seq_lens[static_cast<size_t>(r)];
      for (int t = 0; t < len; ++t) ++counts[static_cast<size_t>(t)];
      for (int l = 0; l < cfg.layers; ++l) {
        const auto& out = fwd.head_outputs[static_cast<size_t>(l)];
        sums[static_cast<size_t>(l)].topRows(len) +=
            out.middleRows(static_cast<Eigen::Index>(r) * b.width, len).cast<double>();
      }
    }
  }
  const double n = static_cast<double>(samples.size());
  map.baseline = static_cast<double>(baseline_correct) / n;

  for (int l = 0; l < cfg.layers; ++l) {
    Matrix<float> mean(width, cfg.embed_dim);
    for (int t = 0; t < width; ++t) {
      const double c = static_cast<double>(std::max<int64_t>(1, counts[static_cast<size_t>(t)]));
      mean.row(t) = (sums[static_cast<size_t>(l)].row(t) / c).cast<float>();
    }
    for (int h = 0; h < cfg.heads; ++h) {
      HeadPatch<float> patch;
      patch.layer = l;
      patch.head = h;
      patch.values = mean.middleCols(h * hd, hd);
      const double acc = static_cast<double>(CountCorrect(params, batches, &patch)) / n;
      map.drop.at(l, h) = map.baseline - acc;
    }
  }
  return map;
}

double AblationMapDiff(const HeadGrid& a, const HeadGrid& b) {
  if (a.layers != b.layers || a.heads != b.heads) throw ShapeMismatch("ablation maps differ in shape");
  if (a.values.empty()) return 0;
  double sum = 0;
  for (size_t i = 0; i < a.values.size(); ++i) sum += std::abs(a.values[i] - b.values[i]);
  return sum / static_cast<double>(a.values.size());
}

double AblationMapDiff(const AblationMap& a, const AblationMap& b) { return AblationMapDiff(a.drop, b.drop); }

std::optional<double> Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeMismatch("correlation inputs differ in length");
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

void CircuitSeries::Correlate() {
  std::vector<double> gap, attn, abl;
  for (const auto& p : points) {
    gap.push_back(p.gap);
    attn.push_back(p.attention_diff);
    abl.push_back(p.ablation_diff);
  }
  attention_correlation = Pearson(gap, attn);
  ablation_correlation = Pearson(gap, abl);
}

CircuitSeries ComputeCircuitSeries(std::span<const CircuitCheckpoint> checkpoints, Task main, Task aux,
                                   const CircuitOptions& options) {
  CircuitSeries series;
  for (const auto& ck : checkpoints) {
    const LogitFn model = ModelLogits(ck.params);
    CircuitPoint p;
    p.iteration = ck.iteration;
    const auto main_curve = ComputeAccuracyCurve(model, main, options.gap_lengths, options.gap_eval, ck.iteration);
    const auto aux_curve = ComputeAccuracyCurve(model, aux, options.gap_lengths, options.gap_eval, ck.iteration);
    p.gap = GeneralizationGap(main_curve, aux_curve, options.gap_lengths);
    p.attention_diff =
        TaskAttentionDiff(ck.params, main, aux, options.analysis_length, options.analysis_eval, options.average_rows)
            .total;
    const auto map_main = MeanAblationMap(ck.params, main, options.analysis_length, options.analysis_eval, ck.iteration);
    const auto map_aux = MeanAblationMap(ck.params, aux, options.analysis_length, options.analysis_eval, ck.iteration);
    p.ablation_diff = AblationMapDiff(map_main, map_aux);
    series.points.push_back(p);
  }
  series.Correlate();
  return series;
}

void WriteAblationCsv(std::ostream& out, const AblationMap& map) {
  out << "layer";
  for (int h = 0; h < map.drop.heads; ++h) out << ",head" << h;
  out << '\n';
  for (int l = 0; l < map.drop.layers; ++l) {
    out << l;
    for (int h = 0; h < map.drop.heads; ++h) out << ',' << map.drop.at(l, h);
    out << '\n';
  }
}

void WriteSeriesCsv(std::ostream& out, const CircuitSeries& series) {
  out << "iter,metric,value\n";
  for (const auto& p : series.points) {
    out << p.iteration << ",gap," << p.gap << '\n';
    out << p.iteration << ",attention_diff," << p.attention_diff << '\n';
    out << p.iteration << ",ablation_diff," << p.ablation_diff << '\n';
  }
  auto corr = [&out](const char* name, const std::optional<double>& v) {
    out << "-1," << name << ',';
    if (v) out << *v;
    out << '\n';
  };
  corr("corr_gap_attention_diff", series.attention_correlation);
  corr("corr_gap_ablation_diff", series.ablation_correlation);
}

}  // namespace lenxfer
