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

#include "lenxfer/eval.h"

#include <gtest/gtest.h>

#include <sstream>

#include "lenxfer/rng.h"
#include "lenxfer/tasks_string.h"

namespace lenxfer {
namespace {

constexpr int kVocab = 139;

// Teacher-forced oracle: predicts whatever token actually follows.
Matrix<float> PeekLogits(const Batch& b) {
  Matrix<float> out = Matrix<float>::Zero(b.rows * b.width, kVocab);
  for (int r = 0; r < b.rows; ++r) {
    for (int t = 1; t < b.width; ++t) out(r * b.width + t - 1, b.Token(r, t)) = 1.0f;
  }
  return out;
}

Matrix<float> RandomLogits(const Batch& b) {
  Rng rng(static_cast<uint64_t>(b.tokens.size()));
  Matrix<float> out(b.rows * b.width, kVocab);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = static_cast<float>(rng.Normal());
  return out;
}

// Autoregressive solver for `reverse` that reads only the prompt and its
// own output. With `flawed`, prompts starting with a digit get a wrong
// final character.
LogitFn ReverseSolver(bool flawed) {
  return [flawed](const Batch& b) {
    const Vocab& v = Vocab::Get();
    Matrix<float> out = Matrix<float>::Zero(b.rows * b.width, kVocab);
    for (int r = 0; r < b.rows; ++r) {
      const int len = b.seq_lens[static_cast<size_t>(r)];
      std::vector<int> seq(b.tokens.begin() + r * b.width, b.tokens.begin() + r * b.width + len);
      for (int t = 0; t < len; ++t) {
        // Prediction at position t sees seq[0..t].
        const std::vector<int> prefix(seq.begin() + 1, seq.begin() + t + 1);
        const std::string text = v.Decode(prefix);
        const size_t eq = text.find('=');
        int next = v.pad();
        if (eq != std::string::npos) {
          std::string answer = SolveReverse(text.substr(0, eq));
          if (flawed && !answer.empty() && std::isdigit(static_cast<unsigned char>(text[0]))) {
            answer.back() = answer.back() == 'x' ? 'y' : 'x';
          }
          const size_t done = text.size() - eq - 1;
          next = done < answer.size() ? v.Id(std::string(1, answer[done])) : v.eos();
        }
        out(r * b.width + t, next) = 1.0f;
      }
    }
    return out;
  };
}

EvalOptions Opts(int n, uint64_t seed = 1234) {
  EvalOptions o;
  o.examples = n;
  o.seed = seed;
  o.chunk = 32;
  return o;
}

TEST(ArgmaxTest, TiesGoToLowestIndex) {
  Eigen::Matrix<float, 1, Eigen::Dynamic> row(5);
  row << 1, 3, 3, 0, 3;
  EXPECT_EQ(ArgmaxLowest(row), 1);
  row << 2, 2, 2, 2, 2;
  EXPECT_EQ(ArgmaxLowest(row), 0);
}

TEST(ExactMatchTest, PerfectAndRandomPredictors) {
  for (Task t : {Task::kReverseAdd, Task::kMqar, Task::kDfsTrace, Task::kCotMultiply}) {
    const int len = t == Task::kDfsTrace ? 8 : 6;
    EXPECT_EQ(AccuracyAtLength(PeekLogits, t, len, Opts(100)), 1.0) << TaskName(t);
    EXPECT_EQ(AccuracyAtLength(RandomLogits, t, len, Opts(100)), 0.0) << TaskName(t);
  }
}

TEST(ExactMatchTest, SingleWrongTokenFailsTheRow) {
  const std::vector<Sample> s = {EncodeInstance({Task::kReverseAdd, 1, "1+2=", "30"})};
  const Batch b = MakeBatch(s);
  Matrix<float> logits = PeekLogits(b);
  EXPECT_EQ(TeacherForcedExactMatch(logits, b)[0], 1);
  // Position 5 predicts token 6 (the '0').
  logits(5, Vocab::Get().Id("0")) = 0.0f;
  logits(5, Vocab::Get().Id("9")) = 1.0f;
  EXPECT_EQ(TeacherForcedExactMatch(logits, b)[0], 0);
  // Unmasked positions do not count.
  Matrix<float> other = PeekLogits(b);
  other.row(0).setZero();
  EXPECT_EQ(TeacherForcedExactMatch(other, b)[0], 1);
}

TEST(GreedyDecodeTest, MatchesReferenceSolver) {
  const Vocab& v = Vocab::Get();
  const LogitFn model = ReverseSolver(false);
  for (int i = 0; i < 20; ++i) {
    const Sample s = TestInstance(Task::kReverse, 7, 99, i);
    std::vector<int> prompt = {v.bos()};
    prompt.insert(prompt.end(), s.input.begin(), s.input.end());
    const auto out = GreedyDecode(model, prompt, 20, 64);
    EXPECT_EQ(out, s.target);
  }
}

TEST(GreedyDecodeTest, LimitsAndOverflow) {
  const Vocab& v = Vocab::Get();
  const LogitFn model = ReverseSolver(false);
  const std::vector<int> prompt = {v.bos(), v.Id("a"), v.Id("b"), v.Id("=")};
  EXPECT_TRUE(GreedyDecode(model, prompt, 0, 64).empty());
  EXPECT_EQ(GreedyDecode(model, prompt, 1, 64), std::vector<int>{v.Id("b")});
  // Context full after one new token.
  EXPECT_EQ(GreedyDecode(model, prompt, 10, 5).size(), 1u);
  EXPECT_THROW(GreedyDecode(model, prompt, 1, 3), ContextOverflow);
}

// Teacher-forced scoring agrees with free decoding row by row.
TEST(GreedyDecodeTest, TeacherForcingAgreesWithDecoding) {
  const Vocab& v = Vocab::Get();
  const LogitFn model = ReverseSolver(true);
  const auto samples = BuildTestSet(Task::kReverse, 6, Opts(120, 5));
  const Batch b = MakeBatch(samples);
  const auto tf = TeacherForcedExactMatch(model(b), b);
  std::vector<std::vector<int>> prompts;
  for (const auto& s : samples) {
    std::vector<int> p = {v.bos()};
    p.insert(p.end(), s.input.begin(), s.input.end());
    prompts.push_back(p);
  }
  const auto decoded = GreedyDecodeBatch(model, prompts, 20, 64);
  int mismatches = 0, failures = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    mismatches += tf[i] != static_cast<uint8_t>(decoded[i] == samples[i].target);
    failures += !tf[i];
  }
  EXPECT_EQ(mismatches, 0);
  EXPECT_GT(failures, 0);
  EXPECT_LT(failures, 120);
}

TEST(TestSetTest, DeterministicAndPrefixStable) {
  const auto a = BuildTestSet(Task::kReverseAdd, 9, Opts(50));
  const auto b = BuildTestSet(Task::kReverseAdd, 9, Opts(80));
  for (size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i].input, b[i].input);
  const auto c = BuildTestSet(Task::kReverseAdd, 9, Opts(50, 77));
  EXPECT_NE(a[0].input, c[0].input);
  for (const auto& s : a) EXPECT_EQ(s.length, 9);
}

TEST(TestSetTest, NoCollisionsWithTrainingAtModerateLength) {
  const DataStream stream(BuiltinGroup("add_sub"), 0, 64);
  // Length 1 has 100 possible inputs, so the counter must find overlaps.
  EXPECT_GT(CountTrainTestCollisions(stream, 20, Task::kReverseAdd, 1, Opts(100)), 0);
  EXPECT_EQ(CountTrainTestCollisions(stream, 200, Task::kReverseAdd, 12, Opts(256)), 0);
}

AccuracyCurve Curve(std::vector<double> acc) {
  AccuracyCurve c;
  for (size_t i = 0; i < acc.size(); ++i) c.points.push_back({static_cast<int>(i) + 1, acc[i], 10, {}});
  return c;
}

TEST(GapTest, HandCases) {
  const std::vector<int> lens = {1, 2, 3};
  EXPECT_EQ(GeneralizationGap(Curve({1, 0.5, 0}), Curve({1, 0.5, 0}), lens), 0.0);
  EXPECT_EQ(GeneralizationGap(Curve({0, 0, 0}), Curve({1, 1, 1}), lens), 1.0);
  EXPECT_NEAR(GeneralizationGap(Curve({1, 0, 0}), Curve({1, 1, 0}), lens), 1.0 / 3, 1e-15);
  // Main ahead of aux is clamped to zero, not negative.
  EXPECT_EQ(GeneralizationGap(Curve({1, 1, 1}), Curve({0, 0, 0}), lens), 0.0);
  EXPECT_EQ(GeneralizationGap(Curve({1, 1, 1}), Curve({0, 0, 0}), lens, GapMode::kAbsolute), 1.0);
  const std::vector<int> missing = {4};
  EXPECT_THROW(GeneralizationGap(Curve({1}), Curve({1}), missing), MissingLength);
  EXPECT_THROW(GeneralizationGap(Curve({1}), Curve({1}), std::span<const int>{}), MissingLength);
}

TEST(GapTest, FuzzStaysInUnitInterval) {
  Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    const int n = static_cast<int>(rng.UniformInt(1, 12));
    std::vector<double> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
    std::vector<int> lens;
    for (int k = 0; k < n; ++k) {
      a[static_cast<size_t>(k)] = rng.Uniform01();
      b[static_cast<size_t>(k)] = rng.Uniform01();
      lens.push_back(k + 1);
    }
    for (GapMode m : {GapMode::kClamped, GapMode::kAbsolute}) {
      const double g = GeneralizationGap(Curve(a), Curve(b), lens, m);
      ASSERT_GE(g, 0.0);
      ASSERT_LE(g, 1.0);
    }
  }
}

TEST(CurveTest, LengthsMustIncrease) {
  const std::vector<int> bad = {3, 2};
  EXPECT_THROW(ComputeAccuracyCurve(PeekLogits, Task::kReverse, bad, Opts(4)), std::invalid_argument);
  const std::vector<int> good = {2, 5};
  const auto c = ComputeAccuracyCurve(PeekLogits, Task::kReverse, good, Opts(4), 17);
  EXPECT_EQ(c.iteration, 17);
  EXPECT_EQ(c.At(5), 1.0);
  EXPECT_THROW(c.At(3), MissingLength);
}

TEST(CurveTest, SemanticScoreForTraces) {
  EvalOptions o = Opts(20);
  o.semantic = true;
  const CurvePoint p = EvaluateLength(RandomLogits, Task::kDfsTrace, 6, o);
  ASSERT_TRUE(p.semantic.has_value());
  EXPECT_EQ(*p.semantic, 0.0);
  EXPECT_FALSE(EvaluateLength(RandomLogits, Task::kReverse, 6, o).semantic.has_value());
}

TEST(CurveTest, CsvFormat) {
  const std::vector<AccuracyCurve> curves = {Curve({1, 0.5})};
  std::ostringstream out;
  WriteCurveCsv(out, curves);
  EXPECT_EQ(out.str(),
            "task,iter,length,n,exact_match,semantic_match\n"
            "reverse_add,0,1,10,1,\n"
            "reverse_add,0,2,10,0.5,\n");
}

TEST(LengthsTest, ParseAndDefaults) {
  EXPECT_EQ(ParseLengths("1:4,8,3"), (std::vector<int>{1, 2, 3, 4, 8}));
  EXPECT_EQ(ParseLengths("16"), (std::vector<int>{16}));
  EXPECT_THROW(ParseLengths("4:1"), std::invalid_argument);
  EXPECT_THROW(ParseLengths("a"), std::invalid_argument);
  EXPECT_THROW(ParseLengths("1,,2"), std::invalid_argument);
  const auto lens = DefaultGapLengths(BuiltinGroup("add_carry"));
  EXPECT_EQ(lens.front(), 1);
  EXPECT_EQ(lens.back(), 36);
  EXPECT_EQ(DefaultGapLengths(BuiltinGroup("reverse")).back(), 20);
}

}  // namespace
}  // namespace lenxfer
