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

#include <gtest/gtest.h>

#include <sstream>

#include "oracles.h"

namespace lenxfer {
namespace {

EvalOptions Opts(int n) {
  EvalOptions o;
  o.examples = n;
  o.chunk = 64;
  return o;
}

Batch ShapeOnly(int rows, int width, std::vector<int> lens) {
  Batch b;
  b.rows = rows;
  b.width = width;
  b.seq_lens = std::move(lens);
  return b;
}

TEST(PlantedModelTest, SolvesCopyAtLengthOne) {
  const auto p = oracle::PlantedCopyModel(1, 0);
  EXPECT_EQ(AccuracyAtLength(ModelLogits(p), Task::kStringCopy, 1, Opts(200)), 1.0);
}

TEST(AblationTest, PlantedHeadIsTheUniqueMaximum) {
  for (const auto& [layer, head] : {std::pair{0, 1}, std::pair{1, 0}}) {
    const auto p = oracle::PlantedCopyModel(layer, head);
    const AblationMap map = MeanAblationMap(p, Task::kStringCopy, 1, Opts(200), 42);
    EXPECT_EQ(map.baseline, 1.0);
    EXPECT_EQ(map.iteration, 42);
    ASSERT_EQ(map.drop.layers, 2);
    ASSERT_EQ(map.drop.heads, 2);
    // Chance of still copying correctly is about one in 62.
    EXPECT_GT(map.drop.at(layer, head), 0.9);
    for (int l = 0; l < 2; ++l) {
      for (int h = 0; h < 2; ++h) {
        if (l != layer || h != head) {
          EXPECT_EQ(map.drop.at(l, h), 0.0) << l << "," << h;
        }
      }
    }
  }
}

// With a single example the mean equals that example's own output.
TEST(AblationTest, SingleExampleAblationIsIdentity) {
  ModelConfig c;
  c.layers = 2;
  c.heads = 2;
  c.embed_dim = 16;
  const auto p = InitParams<float>(c, 3);
  const AblationMap map = MeanAblationMap(p, Task::kReverseAdd, 4, Opts(1));
  for (double d : map.drop.values) EXPECT_EQ(d, 0.0);
}

TEST(AblationTest, MapDiffHandExample) {
  HeadGrid a(1, 2), b(1, 2);
  a.at(0, 0) = 0.5;
  a.at(0, 1) = 0.1;
  b.at(0, 0) = 0.2;
  b.at(0, 1) = 0.4;
  EXPECT_NEAR(AblationMapDiff(a, b), 0.3, 1e-15);
  EXPECT_EQ(AblationMapDiff(a, a), 0.0);
  EXPECT_THROW(AblationMapDiff(a, HeadGrid(2, 1)), ShapeMismatch);
}

TEST(AblationTest, CsvGrid) {
  AblationMap m;
  m.drop = HeadGrid(2, 2);
  m.drop.at(1, 0) = 0.5;
  std::ostringstream out;
  WriteAblationCsv(out, m);
  EXPECT_EQ(out.str(), "layer,head0,head1\n0,0,0\n1,0.5,0\n");
}

TEST(AttentionDiffTest, HandExample) {
  // One head, rows of width 2. Row 0 differs by 0.25 twice, row 1 is equal.
  Matrix<float> a(4, 2), b(4, 2);
  a << 1, 0, 0.5, 0.5, 1, 0, 0.5, 0.5;
  b << 1, 0, 0.25, 0.75, 1, 0, 0.5, 0.5;
  const Batch shape = ShapeOnly(2, 2, {2, 2});
  const auto avg = AttentionDiffFromCaptures({a}, shape, {b}, shape, 1, 1, true);
  const auto sum = AttentionDiffFromCaptures({a}, shape, {b}, shape, 1, 1, false);
  EXPECT_NEAR(avg.total, 0.25, 1e-7);
  EXPECT_NEAR(sum.total, 0.5, 1e-7);
  // Only the shared prefix counts: a one-token row compares just (0, 0).
  const Batch short_b = ShapeOnly(2, 2, {1, 2});
  EXPECT_NEAR(AttentionDiffFromCaptures({a}, shape, {b}, short_b, 1, 1, false).total, 0.0, 1e-7);
  EXPECT_THROW(AttentionDiffFromCaptures({a}, shape, {b}, ShapeOnly(1, 2, {2}), 1, 1), ShapeMismatch);
  EXPECT_THROW(AttentionDiffFromCaptures({a, a}, shape, {b}, shape, 1, 1), ShapeMismatch);
}

TEST(AttentionDiffTest, SelfDiffIsZeroAndBounded) {
  ModelConfig c;
  c.layers = 2;
  c.heads = 2;
  c.embed_dim = 16;
  const auto p = InitParams<float>(c, 4);
  const auto same = TaskAttentionDiff(p, Task::kReverseAdd, Task::kReverseAdd, 5, Opts(40));
  EXPECT_EQ(same.total, 0.0);
  const auto diff = TaskAttentionDiff(p, Task::kReverseAdd, Task::kReverseSubtract, 5, Opts(40));
  EXPECT_GT(diff.total, 0.0);
  // Each attention row is a distribution, so a row pair differs by at most 2.
  const int seq = 1 + 12 + 7;
  for (double v : diff.per_head.values) EXPECT_LE(v, 2.0 * seq);
}

TEST(AttentionDiffTest, ChunkingDoesNotChangeTheResult) {
  ModelConfig c;
  c.layers = 1;
  c.heads = 2;
  c.embed_dim = 16;
  const auto p = InitParams<float>(c, 5);
  EvalOptions small = Opts(30), big = Opts(30);
  small.chunk = 7;
  const auto a = TaskAttentionDiff(p, Task::kStringCopy, Task::kReverse, 6, small);
  const auto b = TaskAttentionDiff(p, Task::kStringCopy, Task::kReverse, 6, big);
  EXPECT_NEAR(a.total, b.total, 1e-9);
}

TEST(PearsonTest, HandValues) {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {2, 4, 6, 8};
  const std::vector<double> z = {4, 3, 2, 1};
  const std::vector<double> flat = {1, 1, 1, 1};
  EXPECT_NEAR(*Pearson(x, y), 1.0, 1e-12);
  EXPECT_NEAR(*Pearson(x, z), -1.0, 1e-12);
  EXPECT_FALSE(Pearson(x, flat).has_value());
  EXPECT_FALSE(Pearson(std::vector<double>{1.0}, std::vector<double>{2.0}).has_value());
  const std::vector<double> u = {1, 2, 3}, v = {1, 3, 2};
  EXPECT_NEAR(*Pearson(u, v), 0.5, 1e-12);
}

TEST(SeriesTest, CsvAndCorrelations) {
  CircuitSeries s;
  s.points = {{100, 0.5, 2.0, 0.1}, {200, 0.25, 1.0, 0.1}};
  s.Correlate();
  EXPECT_NEAR(*s.attention_correlation, 1.0, 1e-12);
  EXPECT_FALSE(s.ablation_correlation.has_value());
  std::ostringstream out;
  WriteSeriesCsv(out, s);
  EXPECT_EQ(out.str(),
            "iter,metric,value\n"
            "100,gap,0.5\n100,attention_diff,2\n100,ablation_diff,0.1\n"
            "200,gap,0.25\n200,attention_diff,1\n200,ablation_diff,0.1\n"
            "-1,corr_gap_attention_diff,1\n-1,corr_gap_ablation_diff,\n");
}

TEST(SeriesTest, ComputesOnePointPerCheckpoint) {
  ModelConfig c;
  c.layers = 1;
  c.heads = 2;
  c.embed_dim = 16;
  std::vector<CircuitCheckpoint> cks = {{10, InitParams<float>(c, 1)}, {20, InitParams<float>(c, 2)}};
  CircuitOptions o;
  o.gap_lengths = {1, 2};
  o.analysis_length = 3;
  o.gap_eval = Opts(8);
  o.analysis_eval = Opts(8);
  const auto s = ComputeCircuitSeries(cks, Task::kReverseAdd, Task::kReverseSubtract, o);
  ASSERT_EQ(s.points.size(), 2u);
  EXPECT_EQ(s.points[1].iteration, 20);
  for (const auto& p : s.points) {
    EXPECT_GE(p.gap, 0.0);
    EXPECT_LE(p.gap, 1.0);
    EXPECT_GT(p.attention_diff, 0.0);
  }
}

}  // namespace
}  // namespace lenxfer
