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

#ifndef LENXFER_TASKS_STRING_H_
#define LENXFER_TASKS_STRING_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lenxfer/rng.h"
#include "lenxfer/task.h"

namespace lenxfer {

class Unsatisfiable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string SolveCopy(std::string_view s);
std::string SolveReverse(std::string_view s);
std::string SolveCapitalize(std::string_view s);
std::string SolveCapitalizeReverse(std::string_view s);

struct MqarQuery {
  int position = 0;
  std::string text;
  char answer = 0;
};

// Target: concatenation of query ++ answer ++ ';' over the queries.
std::string SolveMqar(std::string_view s, const std::vector<MqarQuery>& queries);

struct MqarOptions {
  int query_width = 3;
  // <= 0 selects max(1, length / 4).
  int num_queries = 0;
  int max_attempts = 1000;

  int QueriesFor(int length) const;
};

struct StringInstance {
  Task task = Task::kStringCopy;
  int length = 0;
  std::string s;
  std::vector<MqarQuery> queries;  // MQAR only

  std::string Input() const { return s + "="; }
  std::string Target() const;
};

// Uniform draw over the 62 alphanumeric characters.
std::string RandomAlnum(int length, Rng& rng);

// Each query is a width-w window of s, at distinct uniformly random positions
// in [0, |s| - w - 1], that occurs exactly once in s. Throws Unsatisfiable
// when the retry budget is exhausted.
StringInstance GenMqarInstance(int length, const MqarOptions& options, Rng& rng);

StringInstance SampleStringInstance(Task task, int length, const MqarOptions& mqar, Rng& rng);

// Number of (possibly overlapping) occurrences of needle in haystack.
int CountOccurrences(std::string_view haystack, std::string_view needle);

}  // namespace lenxfer

#endif  // LENXFER_TASKS_STRING_H_
