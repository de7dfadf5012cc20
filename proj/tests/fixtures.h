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

// Reference-table fixtures shared by the unit and acceptance suites.

#ifndef LENXFER_TESTS_FIXTURES_H_
#define LENXFER_TESTS_FIXTURES_H_

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "lenxfer/tasks_maze.h"

namespace lenxfer::fixtures {

inline constexpr char kTableMaze[] =
    "[0]:[10], [15]:[4][5], [11]:[1][3][5], [3]:[11], [4]:[2][15], [14]:[9][5], [10]:[0][9][13], [2]:[4], "
    "[1]:[11], [7]:[5], [13]:[8][10], [5]:[11][7][14][15], [12]:[8][6], [9]:[10][14], [8]:[12][13], [6]:[12] "
    "?[12]>[2]?";

inline std::string StripSpaces(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  return s;
}

// Expansion order that reproduces the reference trace.
inline NeighbourOrder TableOrder() {
  static const std::map<int, std::vector<int>> preferred = {
      {12, {6, 8}}, {8, {13}}, {13, {10}}, {10, {9, 0}}, {9, {14}},
      {14, {5}},    {5, {11, 15, 7}}, {11, {1, 3}}, {15, {4}}, {4, {2}}};
  return [](int node, std::vector<int> ns) {
    const auto it = preferred.find(node);
    if (it == preferred.end()) return ns;
    auto rank = [&](int v) {
      const auto& p = it->second;
      return static_cast<int>(std::find(p.begin(), p.end(), v) - p.begin());
    };
    std::stable_sort(ns.begin(), ns.end(), [&](int a, int b) { return rank(a) < rank(b); });
    return ns;
  };
}

inline constexpr char kTableShortestPath[] = "[12][8][13] [10][9][14] [5][15][4][2]";
inline constexpr char kTableDfsTrace[] = "[12][6]; [12][8][13][10][9][14][5][11][1]; [11][3]; [5][15][4][2]";
inline const std::vector<int> kTableEntryOrder = {0, 15, 11, 3, 4, 14, 10, 2, 1, 7, 13, 5, 12, 9, 8, 6};

}  // namespace lenxfer::fixtures

#endif  // LENXFER_TESTS_FIXTURES_H_
