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

// Independent reference implementations used by the unit and acceptance
// suites. None of them calls into the code under test for the quantity it
// checks.

#ifndef LENXFER_TESTS_ORACLES_H_
#define LENXFER_TESTS_ORACLES_H_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lenxfer/corpus.h"
#include "lenxfer/model.h"
#include "lenxfer/rng.h"
#include "lenxfer/sampler.h"
#include "lenxfer/tasks_maze.h"

namespace lenxfer::oracle {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt FromReversed(const std::string& digits) {
  std::string forward(digits.rbegin(), digits.rend());
  // A leading zero would select octal parsing.
  const size_t first = forward.find_first_not_of('0');
  return first == std::string::npos ? BigInt(0) : BigInt(forward.substr(first));
}

// Least-significant-first decimal string of v, zero-padded to `width`.
inline std::string ToReversed(const BigInt& v, size_t width = 0) {
  std::string forward = v.str();
  std::string out(forward.rbegin(), forward.rend());
  if (out.size() < width) out.append(width - out.size(), '0');
  return out;
}

// Digits of the column carries: out[i] = 1 when column i receives a carry.
inline std::string CarryMask(const std::string& a, const std::string& b) {
  const size_t width = std::max(a.size(), b.size()) + 1;
  std::string out(width, '0');
  BigInt scale = 1, a_low = 0, b_low = 0;
  for (size_t i = 0; i + 1 < width; ++i) {
    a_low += scale * (i < a.size() ? a[i] - '0' : 0);
    b_low += scale * (i < b.size() ? b[i] - '0' : 0);
    scale *= 10;
    // A carry enters column i + 1 iff the low parts overflow 10^(i+1).
    if (a_low + b_low >= scale) out[i + 1] = '1';
  }
  return out;
}

// BFS parent pointers give the start..goal path in any tree or graph.
inline std::vector<int> BfsPath(const MazeGraph& g, int start, int goal) {
  std::map<int, int> parent{{start, start}};
  std::deque<int> queue{start};
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (u == goal) break;
    for (int v : g.adjacency.at(u)) {
      if (parent.emplace(v, u).second) queue.push_back(v);
    }
  }
  if (!parent.count(goal)) return {};
  std::vector<int> path{goal};
  while (path.back() != start) path.push_back(parent.at(path.back()));
  std::reverse(path.begin(), path.end());
  return path;
}

// Canonical edge set, for counting distinct trees.
inline std::set<std::pair<int, int>> EdgeSet(const MazeGraph& g) {
  std::set<std::pair<int, int>> out;
  for (const auto& [u, ns] : g.adjacency) {
    for (int v : ns) out.emplace(std::min(u, v), std::max(u, v));
  }
  return out;
}

// All spanning trees of the 2x2 grid (labels 1..4): the 4-cycle minus one edge.
inline std::vector<std::set<std::pair<int, int>>> SpanningTrees2x2() {
  const std::vector<std::pair<int, int>> cycle = {{1, 2}, {1, 3}, {2, 4}, {3, 4}};
  std::vector<std::set<std::pair<int, int>>> out;
  for (size_t drop = 0; drop < cycle.size(); ++drop) {
    std::set<std::pair<int, int>> t;
    for (size_t i = 0; i < cycle.size(); ++i) {
      if (i != drop) t.insert(cycle[i]);
    }
    out.push_back(t);
  }
  return out;
}

// Finite differences against analytic gradients on `coords` random
// coordinates. Returns the worst |fd - an| / max(1e-6, |fd| + |an|); the
// floor keeps rounding noise from dominating near-zero gradients.
inline double GradCheckWorst(PositionMode mode, int coords, uint64_t seed) {
  ModelConfig c;
  c.layers = 1;
  c.heads = 2;
  c.embed_dim = 8;
  c.max_seq_len = 128;
  c.position = mode;
  auto p = InitParams<double>(c, seed);
  // Larger weights make every path contribute measurably.
  for (auto& t : p.Tensors()) {
    for (double& x : t.span()) x *= 4;
  }
  const DataStream stream(BuiltinGroup("add_carry"), seed, 3);
  const Batch b = stream.BatchAt(0);
  const auto lg = LossAndGradients(p, b);
  auto pt = p.Tensors();
  const auto gt = lg.grads.Tensors();
  size_t total = 0;
  for (const auto& t : pt) total += t.size();
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  double worst = 0;
  for (int k = 0; k < coords; ++k) {
    auto flat = static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(total) - 1));
    size_t ti = 0;
    while (flat >= pt[ti].size()) flat -= pt[ti++].size();
    double& x = pt[ti].data[flat];
    const double old = x;
    auto central = [&](double h) {
      x = old + h;
      const double lp = MaskedLoss(Forward(p, b).logits, b);
      x = old - h;
      const double lm = MaskedLoss(Forward(p, b).logits, b);
      x = old;
      return (lp - lm) / (2 * h);
    };
    // Richardson extrapolation cancels the h^2 term.
    const double h = 1e-4;
    const double fd = (4 * central(h) - central(2 * h)) / 3;
    const double an = gt[ti].data[flat];
    worst = std::max(worst, std::abs(fd - an) / std::max(1e-6, std::abs(fd) + std::abs(an)));
  }
  return worst;
}

// A two-layer, two-head NoPE model that solves string_copy at length 1
// entirely through head `head` of layer `layer`; every other head and both
// MLPs are zero.
//
// Residual layout (D = 280): dims [0, 139) hold the token one-hot, dims
// [140, 279) hold the copied token. The planted head attends from '=' to
// the alphanumeric input character and writes its one-hot into the copy
// dims. Unembedding maps copy dim 140 + j to token j, and maps every
// alphanumeric token one-hot to <eos>, so the position after the copied
// character predicts <eos>.
inline ModelParams<float> PlantedCopyModel(int layer, int head) {
  const Vocab& vocab = Vocab::Get();
  const int V = vocab.size();
  ModelConfig c;
  c.layers = 2;
  c.heads = 2;
  c.embed_dim = 280;
  c.vocab_size = V;
  c.max_seq_len = 64;
  c.position = PositionMode::kNope;
  const int D = c.embed_dim, hd = c.HeadDim();
  auto p = ModelParams<float>::Zeros(c);
  const float s = std::sqrt(static_cast<float>(D));
  for (int t = 0; t < V; ++t) p.embedding(t, t) = s;
  p.final_norm.setOnes();
  auto is_alnum = [&](int t) {
    const std::string& tok = vocab.Token(t);
    return tok.size() == 1 && std::isalnum(static_cast<unsigned char>(tok[0]));
  };
  for (auto& l : p.layers) {
    l.attn_norm.setOnes();
    l.mlp_norm.setOnes();
  }
  auto& l = p.layers[static_cast<size_t>(layer)];
  const int base = head * hd;
  const int eq = vocab.Id("=");
  l.wq(eq, base) = 10.0f;
  for (int t = 0; t < V; ++t) {
    if (is_alnum(t)) l.wk(t, base) = 1.0f;
    l.wv(t, base + t) = 1.0f;
    l.wo(base + t, 140 + t) = 1.0f;
  }
  const float alpha = 1.0f;
  for (int t = 0; t < V; ++t) {
    p.unembedding(140 + t, t) = alpha;
    if (is_alnum(t)) p.unembedding(t, vocab.eos()) = alpha;
  }
  return p;
}

}  // namespace lenxfer::oracle

#endif  // LENXFER_TESTS_ORACLES_H_
