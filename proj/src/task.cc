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

#include "lenxfer/task.h"

#include <stdexcept>
#include <string>
#include <utility>

namespace lenxfer {
namespace {

constexpr std::array<std::pair<Task, std::string_view>, 13> kTaskNames = {{
    {Task::kReverseAdd, "reverse_add"},
    {Task::kNoCarry, "no_carry"},
    {Task::kCarryOnly, "carry_only"},
    {Task::kReverseSubtract, "reverse_subtract"},
    {Task::kCotMultiply, "cot_multiply"},
    {Task::kCopyFirstOp, "copy_first_op"},
    {Task::kStringCopy, "string_copy"},
    {Task::kMqar, "mqar"},
    {Task::kCapitalize, "capitalize"},
    {Task::kReverse, "reverse"},
    {Task::kCapitalizeReverse, "capitalize_reverse"},
    {Task::kShortestPath, "shortest_path"},
    {Task::kDfsTrace, "dfs_trace"},
}};

}  // namespace

std::string_view TaskName(Task task) {
  for (const auto& [t, name] : kTaskNames) {
    if (t == task) return name;
  }
  return "unknown";
}

Task TaskFromName(std::string_view name) {
  for (const auto& [t, n] : kTaskNames) {
    if (n == name) return t;
  }
  throw std::invalid_argument("unknown task: " + std::string(name));
}

bool IsArithmetic(Task task) {
  switch (task) {
    case Task::kReverseAdd:
    case Task::kNoCarry:
    case Task::kCarryOnly:
    case Task::kReverseSubtract:
    case Task::kCotMultiply:
    case Task::kCopyFirstOp:
      return true;
    default:
      return false;
  }
}

bool IsMaze(Task task) {
  return task == Task::kShortestPath || task == Task::kDfsTrace;
}

bool IsString(Task task) { return !IsArithmetic(task) && !IsMaze(task); }

}  // namespace lenxfer
