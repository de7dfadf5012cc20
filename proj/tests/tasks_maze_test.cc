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

#include "lenxfer/tasks_maze.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "lenxfer/corpus.h"
#include "lenxfer/rng.h"
#include "fixtures.h"
#include "oracles.h"

namespace lenxfer {
namespace {

using fixtures::kTableMaze;
using fixtures::StripSpaces;
using fixtures::TableOrder;

TEST(MazeGoldenTest, ParseReferenceMaze) {
  const MazeGraph g = ParseMaze(kTableMaze);
  EXPECT_EQ(g.NumNodes(), 16);
  EXPECT_EQ(g.NumEdges(), 15);
  EXPECT_TRUE(g.IsTree());
  EXPECT_EQ(g.start, 12);
  EXPECT_EQ(g.goal, 2);
  EXPECT_TRUE(g.HasEdge(5, 14));
  EXPECT_FALSE(g.HasEdge(5, 2));
}

TEST(MazeGoldenTest, ShortestPathRow) {
  const MazeGraph g = ParseMaze(kTableMaze);
  const std::string expected = "[12][8][13] [10][9][14] [5][15][4][2]";
  EXPECT_EQ(RenderNodes(TreeShortestPath(g, g.start, g.goal)), StripSpaces(expected));
}

TEST(MazeGoldenTest, DfsTraceRow) {
  const MazeGraph g = ParseMaze(kTableMaze);
  const std::string expected = "[12][6]; [12][8][13][10][9][14][5][11][1]; [11][3]; [5][15][4][2]";
  const DfsTrace trace = DfsTraceWithOrder(g, g.start, g.goal, TableOrder());
  EXPECT_EQ(trace.Render(), expected);
  EXPECT_TRUE(ValidateDfsTrace(g, g.start, g.goal, DfsTrace::Parse(expected)));
}

TEST(MazeGoldenTest, OrderedSerializationReproducesInput) {
  const MazeGraph g = ParseMaze(kTableMaze);
  const std::vector<int> order = {0, 15, 11, 3, 4, 14, 10, 2, 1, 7, 13, 5, 12, 9, 8, 6};
  EXPECT_EQ(SerializeMazeOrdered(g, order), kTableMaze);
}

TEST(MazeParseTest, RejectsMalformed) {
  EXPECT_THROW(ParseMaze("[1]:[2] ?[1]>[2]"), MazeParseError);
  EXPECT_THROW(ParseMaze("[1][2] ?[1]>[2]?"), MazeParseError);
  EXPECT_THROW(ParseMaze("[1]:[2], [2]:[3] ?[1]>[2]?"), MazeParseError);
  EXPECT_THROW(ParseMaze("[1]:[2], [2]:[1] ?[1]>[7]?"), MazeParseError);
}

TEST(MazeTest, DisconnectedThrows) {
  MazeGraph g;
  g.AddEdge(1, 2);
  g.AddEdge(3, 4);
  EXPECT_FALSE(g.IsTree());
  EXPECT_THROW(TreeShortestPath(g, 1, 4), Disconnected);
}

TEST(WilsonTest, TwoByTwoIsUniform) {
  const auto trees = oracle::SpanningTrees2x2();
  std::map<std::set<std::pair<int, int>>, int> counts;
  Rng rng(2024);
  const int draws = 8000;
  for (int i = 0; i < draws; ++i) {
    const MazeGraph g = GeneratePartialMaze(4, rng, 2);
    ASSERT_TRUE(g.IsTree());
    ++counts[oracle::EdgeSet(g)];
  }
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& t : trees) EXPECT_NEAR(counts[t] / static_cast<double>(draws), 0.25, 0.03);
}

TEST(WilsonTest, PartialMazeInvariants) {
  Rng rng(7);
  for (int n : {2, 5, 16, 33, 64}) {
    for (int i = 0; i < 60; ++i) {
      const MazeGraph g = GeneratePartialMaze(n, rng);
      ASSERT_EQ(g.NumNodes(), n);
      ASSERT_TRUE(g.IsTree());
      ASSERT_TRUE(g.EdgesOnGrid());
      ASSERT_NE(g.start, g.goal);
      ASSERT_TRUE(g.HasNode(g.start));
      ASSERT_TRUE(g.HasNode(g.goal));
      for (const auto& [u, ns] : g.adjacency) {
        ASSERT_GE(u, 1);
        ASSERT_LE(u, 64);
      }
    }
  }
}

TEST(WilsonTest, RejectsBadCounts) {
  Rng rng(1);
  EXPECT_THROW(GeneratePartialMaze(1, rng), std::invalid_argument);
  EXPECT_THROW(GeneratePartialMaze(65, rng), std::invalid_argument);
}

TEST(MazeSolverTest, ShortestPathMatchesBfs) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const MazeGraph g = GeneratePartialMaze(static_cast<int>(rng.UniformInt(2, 64)), rng);
    ASSERT_EQ(TreeShortestPath(g, g.start, g.goal), oracle::BfsPath(g, g.start, g.goal));
  }
}

TEST(MazeSolverTest, GeneratedTracesValidate) {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const MazeGraph g = GeneratePartialMaze(static_cast<int>(rng.UniformInt(2, 64)), rng);
    const DfsTrace t = GenerateDfsTrace(g, g.start, g.goal, rng);
    ASSERT_TRUE(ValidateDfsTrace(g, g.start, g.goal, t)) << t.Render();
    ASSERT_EQ(t.segments.front().front(), g.start);
    ASSERT_EQ(t.segments.back().back(), g.goal);
    ASSERT_EQ(DfsTrace::Parse(t.Render()).segments, t.segments);
  }
}

TEST(MazeSolverTest, ValidatorRejectsCorruptedTraces) {
  const MazeGraph g = ParseMaze(kTableMaze);
  auto reject = [&](const std::string& s) { return !ValidateDfsTrace(g, 12, 2, DfsTrace::Parse(s)); };
  // Skips the backtrack to 12.
  EXPECT_TRUE(reject("[12][6]; [6][8][13][10][9][14][5][15][4][2]"));
  // Stops before the goal.
  EXPECT_TRUE(reject("[12][8][13][10][9][14][5][15][4]"));
  // Jumps along a non-edge.
  EXPECT_TRUE(reject("[12][8][13][10][9][14][5][2]"));
  // Revisits node 1.
  EXPECT_TRUE(reject("[12][8][13][10][9][14][5][11][1]; [11][3]; [11][1]"));
  // Continues after reaching the goal.
  EXPECT_TRUE(reject("[12][8][13][10][9][14][5][15][4][2]; [5][7]"));
  // The lucky direct descent is a legal trace.
  EXPECT_FALSE(reject("[12][8][13][10][9][14][5][15][4][2]"));
}

TEST(MazeSolverTest, ValidatorAcceptsEveryOrderOnSmallTree) {
  // Star with centre 1: any order of the leaves is legal.
  MazeGraph g;
  g.AddEdge(1, 2);
  g.AddEdge(1, 3);
  g.AddEdge(1, 4);
  EXPECT_TRUE(ValidateDfsTrace(g, 1, 4, DfsTrace::Parse("[1][2]; [1][3]; [1][4]")));
  EXPECT_TRUE(ValidateDfsTrace(g, 1, 4, DfsTrace::Parse("[1][4]")));
  EXPECT_TRUE(ValidateDfsTrace(g, 1, 4, DfsTrace::Parse("[1][3]; [1][4]")));
  EXPECT_FALSE(ValidateDfsTrace(g, 1, 4, DfsTrace::Parse("[1][3]; [3][4]")));
}

TEST(MazeInstanceTest, InstancesAreTokenizable) {
  const Vocab& v = Vocab::Get();
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const int n = static_cast<int>(rng.UniformInt(2, 64));
    const MazeInstance sp = SampleShortestPathInstance(n, rng);
    const MazeInstance dfs = SampleDfsInstance(n, rng);
    for (const auto* inst : {&sp, &dfs}) {
      ASSERT_EQ(v.Decode(v.Encode(inst->input)), inst->input);
      ASSERT_EQ(v.Decode(v.Encode(inst->target)), inst->target);
      const MazeGraph parsed = ParseMaze(inst->input);
      ASSERT_EQ(oracle::EdgeSet(parsed), oracle::EdgeSet(inst->graph));
    }
    ASSERT_EQ(sp.target, RenderNodes(oracle::BfsPath(sp.graph, sp.graph.start, sp.graph.goal)));
  }
}

TEST(MazeInstanceTest, SerializationRoundTrip) {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const MazeGraph g = GeneratePartialMaze(static_cast<int>(rng.UniformInt(2, 64)), rng);
    const MazeGraph back = ParseMaze(SerializeMaze(g, rng));
    EXPECT_EQ(oracle::EdgeSet(back), oracle::EdgeSet(g));
    EXPECT_EQ(back.start, g.start);
    EXPECT_EQ(back.goal, g.goal);
  }
}

}  // namespace
}  // namespace lenxfer
