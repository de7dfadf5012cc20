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

#ifndef LENXFER_TASK_H_
#define LENXFER_TASK_H_

#include <array>
#include <string_view>

namespace lenxfer {

enum class Task {
  kReverseAdd,
  kNoCarry,
  kCarryOnly,
  kReverseSubtract,
  kCotMultiply,
  kCopyFirstOp,
  kStringCopy,
  kMqar,
  kCapitalize,
  kReverse,
  kCapitalizeReverse,
  kShortestPath,
  kDfsTrace,
};

inline constexpr std::array<Task, 13> kAllTasks = {
    Task::kReverseAdd,      Task::kNoCarry,     Task::kCarryOnly,
    Task::kReverseSubtract, Task::kCotMultiply, Task::kCopyFirstOp,
    Task::kStringCopy,      Task::kMqar,        Task::kCapitalize,
    Task::kReverse,         Task::kCapitalizeReverse,
    Task::kShortestPath,    Task::kDfsTrace,
};

// Stable snake_case names used in configs, CSVs and the CLI.
std::string_view TaskName(Task task);

// Throws std::invalid_argument for unknown names.
Task TaskFromName(std::string_view name);

bool IsArithmetic(Task task);
bool IsString(Task task);
bool IsMaze(Task task);

}  // namespace lenxfer

#endif  // LENXFER_TASK_H_
