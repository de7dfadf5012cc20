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

#ifndef LENXFER_TASKS_MAZE_H_
#define LENXFER_TASKS_MAZE_H_

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lenxfer/rng.h"

namespace lenxfer {

class Disconnected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MazeParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kGridSide = 8;

// An undirected tree over labelled nodes plus a start/goal query.
//
// Generated mazes label grid cell (row, col) as row * side + col + 1, so an
// 8x8 grid uses labels 1..64. Parsed mazes may carry arbitrary non-negative
// labels.
struct MazeGraph {
  std::map<int, std::vector<int>> adjacency;
  int start = -1;
  int goal = -1;
  int grid_side = kGridSide;

  int NumNodes() const { return static_cast<int>(adjacency.size()); }
  int NumEdges() const;
  bool HasNode(int node) const { return adjacency.count(node) > 0; }
  bool HasEdge(int u, int v) const;
  void AddEdge(int u, int v);

  // Connected with |E| = |V| - 1.
  bool IsTree() const;
  // Every edge joins 4-neighbours on the grid; every label is a grid cell.
  bool EdgesOnGrid() const;
};

// Partial maze with exactly num_nodes nodes, grown by loop-erased random
// walks from a uniformly chosen root. When the last walk would overshoot
// the target count, only the part adjacent to the tree is kept. Start and
// goal are distinct nodes drawn uniformly.
MazeGraph GeneratePartialMaze(int num_nodes, Rng& rng, int grid_side = kGridSide);

// "[u]:[v][w], [x]:[y] ?[s]>[g]?" with entry and neighbour order shuffled.
std::string SerializeMaze(const MazeGraph& g, Rng& rng);

// Serialization with the stored adjacency order (map order for entries).
std::string SerializeMazeOrdered(const MazeGraph& g, const std::vector<int>& entry_order);

// Inverse of SerializeMaze. Throws MazeParseError.
MazeGraph ParseMaze(std::string_view text);

// The unique simple path start..goal. Throws Disconnected.
std::vector<int> TreeShortestPath(const MazeGraph& g, int start, int goal);

// "[a][b][c]"
std::string RenderNodes(const std::vector<int>& nodes);

struct DfsTrace {
  std::vector<std::vector<int>> segments;

  // Segments joined by "; ".
  std::string Render() const;
  static DfsTrace Parse(std::string_view text);
};

// Depth-first search from start that stops at goal. Each node's neighbours
// are expanded in the order returned by `order(node, unvisited neighbours)`.
// A segment begins at the node a move is made from whenever that node is not
// the node visited last.
using NeighbourOrder = std::function<std::vector<int>(int node, std::vector<int> neighbours)>;
DfsTrace DfsTraceWithOrder(const MazeGraph& g, int start, int goal, const NeighbourOrder& order);

// Same, with neighbour order shuffled by rng at every expansion.
DfsTrace GenerateDfsTrace(const MazeGraph& g, int start, int goal, Rng& rng);

// True iff `trace` is what DfsTraceWithOrder produces for some neighbour
// order.
bool ValidateDfsTrace(const MazeGraph& g, int start, int goal, const DfsTrace& trace);

struct MazeInstance {
  MazeGraph graph;
  std::string input;   // serialized graph and query
  std::string target;  // path or trace
};

MazeInstance SampleShortestPathInstance(int num_nodes, Rng& rng);
MazeInstance SampleDfsInstance(int num_nodes, Rng& rng);

}  // namespace lenxfer

#endif  // LENXFER_TASKS_MAZE_H_
