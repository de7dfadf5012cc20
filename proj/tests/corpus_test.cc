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

#include "lenxfer/corpus.h"

#include <gtest/gtest.h>

#include <sstream>

#include "lenxfer/instance.h"
#include "lenxfer/rng.h"
#include "lenxfer/task.h"

namespace lenxfer {
namespace {

TEST(VocabTest, SizeAndSpecialIds) {
  const Vocab& v = Vocab::Get();
  EXPECT_EQ(v.size(), 139);
  EXPECT_EQ(v.Token(v.pad()), "<pad>");
  EXPECT_EQ(v.Token(v.bos()), "<bos>");
  EXPECT_EQ(v.Token(v.eos()), "<eos>");
}

TEST(VocabTest, FrozenIdOrder) {
  const Vocab& v = Vocab::Get();
  EXPECT_EQ(v.Id("0"), 3);
  EXPECT_EQ(v.Id("9"), 12);
  EXPECT_EQ(v.Id("a"), 13);
  EXPECT_EQ(v.Id("A"), 39);
  EXPECT_EQ(v.Id("+"), 65);
  EXPECT_EQ(v.Id(" "), 74);
  EXPECT_EQ(v.Id("[1]"), 75);
  EXPECT_EQ(v.Id("[64]"), 138);
}

TEST(VocabTest, EncodeDecodeRoundTrip) {
  const Vocab& v = Vocab::Get();
  for (const std::string s : {"82050465+23782955=", "fVOBA1fR=", "[1]:[2][9], [2]:[1] ?[1]>[9]?", "a;b; c"}) {
    EXPECT_EQ(v.Decode(v.Encode(s)), s);
  }
}

TEST(VocabTest, NodeTokensAreSingleIds) {
  const Vocab& v = Vocab::Get();
  const auto ids = v.Encode("[12][3]");
  ASSERT_EQ(ids.size(), 2u);
  EXPECT_EQ(v.Token(ids[0]), "[12]");
  EXPECT_EQ(v.Token(ids[1]), "[3]");
}

TEST(VocabTest, QueryArrowIsAPlainCharacter) {
  const Vocab& v = Vocab::Get();
  const auto ids = v.Encode("?[1]>[2]?");
  ASSERT_EQ(ids.size(), 5u);
  EXPECT_EQ(ids[2], v.Id(">"));
}

TEST(VocabTest, UnknownTokensThrow) {
  const Vocab& v = Vocab::Get();
  EXPECT_THROW(v.Encode("[0]"), UnknownToken);
  EXPECT_THROW(v.Encode("[65]"), UnknownToken);
  EXPECT_THROW(v.Encode("a/b"), UnknownToken);
  EXPECT_THROW(v.Encode("[3"), UnknownToken);
  EXPECT_THROW(v.Id("<unk>"), UnknownToken);
  EXPECT_THROW(v.Token(139), UnknownToken);
}

TEST(VocabTest, DumpLoadRoundTrip) {
  std::stringstream s;
  Vocab::Get().Dump(s);
  const Vocab loaded = Vocab::Load(s);
  EXPECT_EQ(loaded.tokens(), Vocab::Get().tokens());
}

TEST(SampleTest, SequenceStartsWithBos) {
  const Vocab& v = Vocab::Get();
  const Sample s = EncodeInstance({Task::kStringCopy, 2, "ab=", "ab"});
  const auto seq = s.Sequence(v);
  ASSERT_EQ(seq.size(), 1 + 3 + 3u);
  EXPECT_EQ(seq.front(), v.bos());
  EXPECT_EQ(seq.back(), v.eos());
}

TEST(LossMaskTest, CoversTargetOnly) {
  const Vocab& v = Vocab::Get();
  const Sample s = EncodeInstance({Task::kReverseAdd, 1, "1+2=", "30"});
  const auto mask = MakeLossMask(s, v);
  const std::vector<uint8_t> expected = {0, 0, 0, 0, 1, 1, 1};
  EXPECT_EQ(mask, expected);
}

TEST(LossMaskTest, MqarMasksAnswersOnly) {
  const Vocab& v = Vocab::Get();
  const Sample s = EncodeInstance({Task::kMqar, 8, "fVOBA1fR=", "fVOB;OBA1;"});
  const auto mask = MakeLossMask(s, v);
  ASSERT_EQ(mask.size(), 9 + 11u);
  std::vector<uint8_t> expected(20, 0);
  expected[9 + 3] = 1;  // B
  expected[9 + 8] = 1;  // 1
  EXPECT_EQ(mask, expected);
}

TEST(LossMaskTest, PropertyMaskLengthMatchesSequence) {
  const Vocab& v = Vocab::Get();
  Rng rng(17);
  for (Task t : kAllTasks) {
    for (int i = 0; i < 20; ++i) {
      const int len = static_cast<int>(rng.UniformInt(MinLength(t), IsMaze(t) ? 12 : 10));
      const Sample s = EncodeInstance(SampleTextInstance(t, len, {}, rng));
      const auto mask = MakeLossMask(s, v);
      ASSERT_EQ(mask.size(), s.input.size() + s.target.size());
      for (size_t k = 0; k < s.input.size(); ++k) ASSERT_EQ(mask[k], 0) << TaskName(t);
      int ones = 0;
      for (uint8_t m : mask) ones += m;
      ASSERT_GT(ones, 0) << TaskName(t);
    }
  }
}

}  // namespace
}  // namespace lenxfer
