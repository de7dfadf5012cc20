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

#include "lenxfer/tasks_string.h"

#include <algorithm>
#include <cctype>

namespace lenxfer {
namespace {

constexpr std::string_view kAlnum =
    "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

char FlipCase(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (std::islower(u)) return static_cast<char>(std::toupper(u));
  if (std::isupper(u)) return static_cast<char>(std::tolower(u));
  return c;
}

}  // namespace

std::string SolveCopy(std::string_view s) { return std::string(s); }

std::string SolveReverse(std::string_view s) { return std::string(s.rbegin(), s.rend()); }

std::string SolveCapitalize(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), FlipCase);
  return out;
}

std::string SolveCapitalizeReverse(std::string_view s) { return SolveCapitalize(SolveReverse(s)); }

std::string SolveMqar(std::string_view s, const std::vector<MqarQuery>& queries) {
  std::string out;
  for (const auto& q : queries) {
    const auto width = q.text.size();
    const auto pos = static_cast<size_t>(q.position);
    if (pos + width >= s.size() || s.substr(pos, width) != q.text) {
      throw std::invalid_argument("MQAR query does not match the string");
    }
    out += q.text;
    out += s[pos + width];
    out += ';';
  }
  return out;
}

int MqarOptions::QueriesFor(int length) const {
  return num_queries > 0 ? num_queries : std::max(1, length / 4);
}

std::string StringInstance::Target() const {
  switch (task) {
    case Task::kStringCopy:
      return SolveCopy(s);
    case Task::kReverse:
      return SolveReverse(s);
    case Task::kCapitalize:
      return SolveCapitalize(s);
    case Task::kCapitalizeReverse:
      return SolveCapitalizeReverse(s);
    case Task::kMqar:
      return SolveMqar(s, queries);
    default:
      throw std::invalid_argument("not a string task: " + std::string(TaskName(task)));
  }
}

std::string RandomAlnum(int length, Rng& rng) {
  std::string s(static_cast<size_t>(length), '0');
  for (auto& c : s) c = kAlnum[static_cast<size_t>(rng.UniformInt(0, kAlnum.size() - 1))];
  return s;
}

int CountOccurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty() || needle.size() > haystack.size()) return 0;
  int count = 0;
  for (size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    if (haystack.compare(i, needle.size(), needle) == 0) ++count;
  }
  return count;
}

StringInstance GenMqarInstance(int length, const MqarOptions& options, Rng& rng) {
  const int width = options.query_width;
  if (width < 1 || length < width + 1) {
    throw std::invalid_argument("MQAR needs length >= query_width + 1");
  }
  const int num_queries = options.QueriesFor(length);
  const int num_windows = length - width;  // start positions 0 .. length-w-1
  if (num_queries > num_windows) {
    throw Unsatisfiable("MQAR: more queries than answerable windows");
  }
  StringInstance inst;
  inst.task = Task::kMqar;
  inst.length = length;
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    inst.s = RandomAlnum(length, rng);
    std::vector<int> unique_windows;
    for (int p = 0; p < num_windows; ++p) {
      const auto window = std::string_view(inst.s).substr(static_cast<size_t>(p), static_cast<size_t>(width));
      if (CountOccurrences(inst.s, window) == 1) unique_windows.push_back(p);
    }
    if (static_cast<int>(unique_windows.size()) < num_queries) continue;
    // Partial Fisher-Yates: a uniform subset, in draw order.
    inst.queries.clear();
    for (int i = 0; i < num_queries; ++i) {
      const auto j = static_cast<size_t>(rng.UniformInt(i, static_cast<int64_t>(unique_windows.size()) - 1));
      std::swap(unique_windows[static_cast<size_t>(i)], unique_windows[j]);
      const int p = unique_windows[static_cast<size_t>(i)];
      MqarQuery q;
      q.position = p;
      q.text = inst.s.substr(static_cast<size_t>(p), static_cast<size_t>(width));
      q.answer = inst.s[static_cast<size_t>(p + width)];
      inst.queries.push_back(std::move(q));
    }
    return inst;
  }
  throw Unsatisfiable("MQAR: no unambiguous instance within the retry budget");
}

StringInstance SampleStringInstance(Task task, int length, const MqarOptions& mqar, Rng& rng) {
  if (task == Task::kMqar) return GenMqarInstance(length, mqar, rng);
  if (!IsString(task)) {
    throw std::invalid_argument("not a string task: " + std::string(TaskName(task)));
  }
  if (length < 0) throw std::invalid_argument("string length must be >= 0");
  StringInstance inst;
  inst.task = task;
  inst.length = length;
  inst.s = RandomAlnum(length, rng);
  return inst;
}

}  // namespace lenxfer
