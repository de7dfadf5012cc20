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

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace lenxfer {
namespace {

int CellLabel(int cell) { return cell + 1; }

std::vector<int> GridNeighbours(int cell, int side) {
  const int row = cell / side, col = cell % side;
  std::vector<int> out;
  if (row > 0) out.push_back(cell - side);
  if (row + 1 < side) out.push_back(cell + side);
  if (col > 0) out.push_back(cell - 1);
  if (col + 1 < side) out.push_back(cell + 1);
  return out;
}

std::string NodeToken(int node) { return "[" + std::to_string(node) + "]"; }

// Parses "[k]" at text[pos], advancing pos.
int ParseNode(std::string_view text, size_t& pos) {
  if (pos >= text.size() || text[pos] != '[') {
    throw MazeParseError("expected '[' at offset " + std::to_string(pos));
  }
  const size_t close = text.find(']', pos);
  if (close == std::string_view::npos || close == pos + 1) {
    throw MazeParseError("malformed node token at offset " + std::to_string(pos));
  }
  int value = 0;
  for (size_t i = pos + 1; i < close; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      throw MazeParseError("non-numeric node label at offset " + std::to_string(i));
    }
    value = value * 10 + (text[i] - '0');
  }
  pos = close + 1;
  return value;
}

std::vector<int> ParseNodeRun(std::string_view text) {
  std::vector<int> nodes;
  size_t pos = 0;
  while (pos < text.size()) nodes.push_back(ParseNode(text, pos));
  return nodes;
}

std::string_view Strip(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace

int MazeGraph::NumEdges() const {
  size_t degree_sum = 0;
  for (const auto& [node, nbrs] : adjacency) degree_sum += nbrs.size();
  return static_cast<int>(degree_sum / 2);
}

bool MazeGraph::HasEdge(int u, int v) const {
  auto it = adjacency.find(u);
  if (it == adjacency.end()) return false;
  return std::find(it->second.begin(), it->second.end(), v) != it->second.end();
}

void MazeGraph::AddEdge(int u, int v) {
  adjacency[u].push_back(v);
  adjacency[v].push_back(u);
}

bool MazeGraph::IsTree() const {
  if (adjacency.empty()) return false;
  if (NumEdges() != NumNodes() - 1) return false;
  std::set<int> seen;
  std::vector<int> stack = {adjacency.begin()->first};
  seen.insert(stack.back());
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adjacency.at(u)) {
      if (!HasNode(v)) return false;
      if (seen.insert(v).second) stack.push_back(v);
    }
  }
  return static_cast<int>(seen.size()) == NumNodes();
}

bool MazeGraph::EdgesOnGrid() const {
  const int cells = grid_side * grid_side;
  for (const auto& [u, nbrs] : adjacency) {
    if (u < 1 || u > cells) return false;
    const auto grid = GridNeighbours(u - 1, grid_side);
    for (int v : nbrs) {
      if (std::find(grid.begin(), grid.end(), v - 1) == grid.end()) return false;
    }
  }
  return true;
}

MazeGraph GeneratePartialMaze(int num_nodes, Rng& rng, int grid_side) {
  const int cells = grid_side * grid_side;
  if (grid_side < 2 || num_nodes < 2 || num_nodes > cells) {
    throw std::invalid_argument("maze node count must lie in [2, grid cells]");
  }
  MazeGraph g;
  g.grid_side = grid_side;
  std::vector<bool> in_tree(static_cast<size_t>(cells), false);
  std::vector<int> next(static_cast<size_t>(cells), -1);

  const int root = static_cast<int>(rng.UniformInt(0, cells - 1));
  in_tree[static_cast<size_t>(root)] = true;
  g.adjacency[CellLabel(root)];
  int count = 1;

  std::vector<int> outside;
  while (count < num_nodes) {
    outside.clear();
    for (int c = 0; c < cells; ++c) {
      if (!in_tree[static_cast<size_t>(c)]) outside.push_back(c);
    }
    const int first = outside[static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(outside.size()) - 1))];

    // Random walk until the tree is hit; overwriting next[] erases loops.
    for (int cur = first; !in_tree[static_cast<size_t>(cur)];) {
      const auto nbrs = GridNeighbours(cur, grid_side);
      const int step = nbrs[static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(nbrs.size()) - 1))];
      next[static_cast<size_t>(cur)] = step;
      cur = step;
    }
    std::vector<int> path;
    for (int cur = first; !in_tree[static_cast<size_t>(cur)]; cur = next[static_cast<size_t>(cur)]) {
      path.push_back(cur);
    }
    const auto room = static_cast<size_t>(num_nodes - count);
    if (path.size() > room) path.erase(path.begin(), path.end() - static_cast<std::ptrdiff_t>(room));

    for (int cell : path) {
      const int parent = next[static_cast<size_t>(cell)];
      g.AddEdge(CellLabel(cell), CellLabel(parent));
    }
    // Mark after linking: the kept suffix always ends next to the tree.
    for (int cell : path) in_tree[static_cast<size_t>(cell)] = true;
    count += static_cast<int>(path.size());
  }

  std::vector<int> labels;
  for (const auto& [node, nbrs] : g.adjacency) labels.push_back(node);
  const auto s = rng.UniformInt(0, static_cast<int64_t>(labels.size()) - 1);
  auto t = rng.UniformInt(0, static_cast<int64_t>(labels.size()) - 2);
  if (t >= s) ++t;
  g.start = labels[static_cast<size_t>(s)];
  g.goal = labels[static_cast<size_t>(t)];
  return g;
}

std::string SerializeMazeOrdered(const MazeGraph& g, const std::vector<int>& entry_order) {
  std::string out;
  for (size_t i = 0; i < entry_order.size(); ++i) {
    if (i) out += ", ";
    const int u = entry_order[i];
    out += NodeToken(u) + ":";
    for (int v : g.adjacency.at(u)) out += NodeToken(v);
  }
  out += " ?" + NodeToken(g.start) + ">" + NodeToken(g.goal) + "?";
  return out;
}

std::string SerializeMaze(const MazeGraph& g, Rng& rng) {
  MazeGraph shuffled = g;
  std::vector<int> order;
  for (auto& [node, nbrs] : shuffled.adjacency) {
    order.push_back(node);
    rng.Shuffle(nbrs);
  }
  rng.Shuffle(order);
  return SerializeMazeOrdered(shuffled, order);
}

MazeGraph ParseMaze(std::string_view text) {
  const size_t query = text.find('?');
  if (query == std::string_view::npos || text.back() != '?' || query + 1 >= text.size() - 1) {
    throw MazeParseError("missing '?start>goal?' query");
  }
  MazeGraph g;
  g.grid_side = kGridSide;
  const std::string_view body = Strip(text.substr(0, query));
  size_t pos = 0;
  while (pos < body.size()) {
    size_t end = body.find(", ", pos);
    if (end == std::string_view::npos) end = body.size();
    const std::string_view entry = body.substr(pos, end - pos);
    const size_t colon = entry.find(':');
    if (colon == std::string_view::npos) throw MazeParseError("entry without ':'");
    size_t p = 0;
    const int u = ParseNode(entry.substr(0, colon), p);
    auto& nbrs = g.adjacency[u];
    for (int v : ParseNodeRun(entry.substr(colon + 1))) nbrs.push_back(v);
    pos = end == body.size() ? end : end + 2;
  }
  const std::string_view q = text.substr(query + 1, text.size() - query - 2);
  const size_t arrow = q.find('>');
  if (arrow == std::string_view::npos) throw MazeParseError("query without '>'");
  size_t p = 0;
  g.start = ParseNode(q.substr(0, arrow), p);
  p = 0;
  g.goal = ParseNode(q.substr(arrow + 1), p);
  // Adjacency must be symmetric and the query must name listed nodes.
  for (const auto& [u, nbrs] : g.adjacency) {
    for (int v : nbrs) {
      const auto it = g.adjacency.find(v);
      if (it == g.adjacency.end() || std::find(it->second.begin(), it->second.end(), u) == it->second.end()) {
        throw MazeParseError("edge " + NodeToken(u) + NodeToken(v) + " is not listed in both directions");
      }
    }
  }
  if (!g.HasNode(g.start) || !g.HasNode(g.goal)) throw MazeParseError("query names a node not in the maze");
  return g;
}

std::vector<int> TreeShortestPath(const MazeGraph& g, int start, int goal) {
  if (!g.HasNode(start) || !g.HasNode(goal)) throw Disconnected("start or goal not in maze");
  std::unordered_map<int, int> parent;
  parent[start] = start;
  std::vector<int> stack = {start};
  while (!stack.empty() && !parent.count(goal)) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : g.adjacency.at(u)) {
      if (parent.emplace(v, u).second) stack.push_back(v);
    }
  }
  if (!parent.count(goal)) throw Disconnected("goal unreachable from start");
  std::vector<int> path = {goal};
  while (path.back() != start) path.push_back(parent.at(path.back()));
  std::reverse(path.begin(), path.end());
  return path;
}

std::string RenderNodes(const std::vector<int>& nodes) {
  std::string out;
  for (int n : nodes) out += NodeToken(n);
  return out;
}

std::string DfsTrace::Render() const {
  std::string out;
  for (size_t i = 0; i < segments.size(); ++i) {
    if (i) out += "; ";
    out += RenderNodes(segments[i]);
  }
  return out;
}

DfsTrace DfsTrace::Parse(std::string_view text) {
  DfsTrace trace;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find("; ", pos);
    if (end == std::string_view::npos) end = text.size();
    trace.segments.push_back(ParseNodeRun(text.substr(pos, end - pos)));
    if (end == text.size()) break;
    pos = end + 2;
  }
  return trace;
}

DfsTrace DfsTraceWithOrder(const MazeGraph& g, int start, int goal, const NeighbourOrder& order) {
  if (!g.HasNode(start) || !g.HasNode(goal)) throw Disconnected("start or goal not in maze");
  DfsTrace trace;
  trace.segments.push_back({start});
  if (start == goal) return trace;

  std::unordered_set<int> visited = {start};
  auto unvisited = [&](int node) {
    std::vector<int> out;
    for (int v : g.adjacency.at(node)) {
      if (!visited.count(v)) out.push_back(v);
    }
    return out;
  };
  struct Frame {
    int node;
    std::vector<int> order;
    size_t next = 0;
  };
  std::vector<Frame> stack;
  stack.push_back({start, order(start, unvisited(start))});
  int last = start;
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.order.size()) {
      stack.pop_back();
      continue;
    }
    const int v = top.order[top.next++];
    if (visited.count(v)) continue;
    visited.insert(v);
    if (last != top.node) trace.segments.push_back({top.node});
    trace.segments.back().push_back(v);
    last = v;
    if (v == goal) return trace;
    stack.push_back({v, order(v, unvisited(v))});
  }
  throw Disconnected("goal unreachable from start");
}

DfsTrace GenerateDfsTrace(const MazeGraph& g, int start, int goal, Rng& rng) {
  return DfsTraceWithOrder(g, start, goal, [&rng](int, std::vector<int> nbrs) {
    rng.Shuffle(nbrs);
    return nbrs;
  });
}

bool ValidateDfsTrace(const MazeGraph& g, int start, int goal, const DfsTrace& trace) {
  if (!g.HasNode(start) || !g.HasNode(goal) || trace.segments.empty()) return false;
  if (start == goal) {
    return trace.segments.size() == 1 && trace.segments[0] == std::vector<int>{start};
  }
  std::unordered_set<int> visited;
  std::vector<int> stack;
  auto exhausted = [&](int node) {
    for (int v : g.adjacency.at(node)) {
      if (!visited.count(v)) return false;
    }
    return true;
  };
  for (size_t s = 0; s < trace.segments.size(); ++s) {
    const auto& seg = trace.segments[s];
    if (seg.size() < 2 || !g.HasNode(seg[0])) return false;
    if (s == 0) {
      if (seg[0] != start) return false;
      visited.insert(start);
      stack.push_back(start);
    } else {
      if (std::find(stack.begin(), stack.end(), seg[0]) == stack.end()) return false;
      if (stack.back() == seg[0]) return false;
      while (stack.back() != seg[0]) {
        if (!exhausted(stack.back())) return false;
        stack.pop_back();
      }
    }
    for (size_t i = 1; i < seg.size(); ++i) {
      const int v = seg[i];
      if (!g.HasNode(v) || visited.count(v) || !g.HasEdge(stack.back(), v)) return false;
      visited.insert(v);
      stack.push_back(v);
      if (v == goal) return s + 1 == trace.segments.size() && i + 1 == seg.size();
    }
  }
  return false;
}

MazeInstance SampleShortestPathInstance(int num_nodes, Rng& rng) {
  MazeInstance inst;
  inst.graph = GeneratePartialMaze(num_nodes, rng);
  inst.input = SerializeMaze(inst.graph, rng);
  inst.target = RenderNodes(TreeShortestPath(inst.graph, inst.graph.start, inst.graph.goal));
  return inst;
}

MazeInstance SampleDfsInstance(int num_nodes, Rng& rng) {
  MazeInstance inst;
  inst.graph = GeneratePartialMaze(num_nodes, rng);
  inst.input = SerializeMaze(inst.graph, rng);
  inst.target = GenerateDfsTrace(inst.graph, inst.graph.start, inst.graph.goal, rng).Render();
  return inst;
}

}  // namespace lenxfer
