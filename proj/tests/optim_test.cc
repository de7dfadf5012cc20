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

#include "lenxfer/optim.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace lenxfer {
namespace {

TEST(AdamWTest, FirstStepHandValues) {
  std::vector<double> p = {1.0, -2.0}, g = {0.5, -0.1}, m(2, 0.0), v(2, 0.0);
  AdamWConfig hp;
  hp.weight_decay = 0.1;
  AdamWUpdate<double>(p, g, m, v, 1, 0.01, hp, true);
  // Bias correction makes the first update lr * sign(g) up to eps.
  EXPECT_NEAR(m[0], 0.05, 1e-15);
  EXPECT_NEAR(v[0], 0.01 * 0.25, 1e-15);
  EXPECT_NEAR(p[0], 1.0 * (1 - 0.001) - 0.01 * (0.5 / (0.5 + 1e-8)), 1e-12);
  EXPECT_NEAR(p[1], -2.0 * (1 - 0.001) + 0.01 * (0.1 / (0.1 + 1e-8)), 1e-12);
}

TEST(AdamWTest, SecondStepHandValues) {
  std::vector<double> p = {0.0}, m = {0.0}, v = {0.0};
  AdamWConfig hp;
  hp.weight_decay = 0;
  std::vector<double> g1 = {1.0}, g2 = {-1.0};
  AdamWUpdate<double>(p, g1, m, v, 1, 0.1, hp, true);
  AdamWUpdate<double>(p, g2, m, v, 2, 0.1, hp, true);
  const double m2 = 0.9 * 0.1 - 0.1;
  const double v2 = 0.99 * 0.01 + 0.01;
  const double u2 = (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.9801)) + 1e-8);
  EXPECT_NEAR(m[0], m2, 1e-15);
  EXPECT_NEAR(v[0], v2, 1e-15);
  const double p1 = -0.1 / (1 + 1e-8);
  EXPECT_NEAR(p[0], p1 - 0.1 * u2, 1e-12);
}

TEST(AdamWTest, NoDecayFlagSkipsShrink) {
  std::vector<double> p = {3.0}, g = {0.0}, m = {0.0}, v = {0.0};
  AdamWUpdate<double>(p, g, m, v, 1, 0.5, {}, false);
  EXPECT_EQ(p[0], 3.0);
  AdamWUpdate<double>(p, g, m, v, 2, 0.5, {}, true);
  EXPECT_NEAR(p[0], 3.0 * (1 - 0.05), 1e-15);
  std::vector<double> short_g = {};
  EXPECT_THROW(AdamWUpdate<double>(p, short_g, m, v, 1, 0.1, {}, true), std::invalid_argument);
}

ModelConfig Tiny() {
  ModelConfig c;
  c.layers = 1;
  c.heads = 2;
  c.embed_dim = 8;
  return c;
}

TEST(AdamWStepTest, NormGainsAreNotDecayed) {
  auto p = InitParams<double>(Tiny(), 1);
  const auto grads = ModelParams<double>::Zeros(Tiny());
  auto state = OptimizerState<double>::Init(Tiny());
  const auto before = p;
  AdamWStep(p, grads, state, 0.1);
  EXPECT_EQ(state.step, 1);
  EXPECT_EQ(p.final_norm, before.final_norm);
  EXPECT_EQ(p.layers[0].attn_norm, before.layers[0].attn_norm);
  EXPECT_TRUE(p.embedding.isApprox(before.embedding * (1 - 0.1 * 0.1)));
}

TEST(ClipTest, GlobalNorm) {
  auto g = ModelParams<double>::Zeros(Tiny());
  g.embedding(0, 0) = 3;
  g.unembedding(0, 0) = 4;
  EXPECT_DOUBLE_EQ(GradNorm(g), 5.0);
  EXPECT_DOUBLE_EQ(ClipGradNorm(g, 10.0), 5.0);
  EXPECT_DOUBLE_EQ(g.embedding(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(ClipGradNorm(g, 1.0), 5.0);
  EXPECT_NEAR(GradNorm(g), 1.0, 1e-15);
  EXPECT_NEAR(g.embedding(0, 0), 0.6, 1e-15);
}

TEST(ScheduleTest, ReferenceShape) {
  LrSchedule s;  // 1e-3, warmup 2000, total 20000, decay 5000
  EXPECT_EQ(s.At(0), 0.0);
  EXPECT_NEAR(s.At(1000), 5e-4, 1e-15);
  EXPECT_DOUBLE_EQ(s.At(2000), 1e-3);
  EXPECT_DOUBLE_EQ(s.At(10000), 1e-3);
  EXPECT_DOUBLE_EQ(s.At(15000), 1e-3);
  EXPECT_NEAR(s.At(17500), 5e-4, 1e-15);
  EXPECT_NEAR(s.At(20000), 0.0, 1e-18);
  EXPECT_LT(s.At(19999), 1e-9);
  double prev = s.At(15000);
  for (int64_t it = 15001; it <= 20000; ++it) {
    const double lr = s.At(it);
    ASSERT_LE(lr, prev);
    prev = lr;
  }
}

TEST(ScheduleTest, Validation) {
  LrSchedule s;
  EXPECT_NO_THROW(s.Validate());
  s.warmup_iters = 16000;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
  s = {};
  s.peak_lr = -1;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
  s = {};
  s.total_iters = 0;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
}

// Minimises a quadratic; guards the sign of the update.
TEST(AdamWTest, ConvergesOnQuadratic) {
  std::vector<double> x = {5.0, -3.0}, m(2, 0.0), v(2, 0.0);
  AdamWConfig hp;
  hp.weight_decay = 0;
  for (int step = 1; step <= 2000; ++step) {
    std::vector<double> g = {2 * (x[0] - 1), 2 * (x[1] + 2)};
    AdamWUpdate<double>(x, g, m, v, step, 0.01, hp, true);
  }
  EXPECT_NEAR(x[0], 1.0, 1e-2);
  EXPECT_NEAR(x[1], -2.0, 1e-2);
}

}  // namespace
}  // namespace lenxfer
