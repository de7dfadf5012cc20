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

#ifndef LENXFER_INSTANCE_H_
#define LENXFER_INSTANCE_H_

#include <string>

#include "lenxfer/corpus.h"
#include "lenxfer/rng.h"
#include "lenxfer/task.h"
#include "lenxfer/tasks_string.h"

namespace lenxfer {

struct TaskOptions {
  MqarOptions mqar;
};

// A task instance in text form, before tokenization.
struct TextInstance {
  Task task = Task::kReverseAdd;
  int length = 0;
  std::string input;
  std::string target;
};

// Smallest length parameter the task's sampler accepts.
int MinLength(Task task, const TaskOptions& options = {});

TextInstance SampleTextInstance(Task task, int length, const TaskOptions& options, Rng& rng);

// Appends <eos> to the target.
Sample EncodeInstance(const TextInstance& instance, const Vocab& vocab = Vocab::Get());

// Test-set instance `index` at (task, length): a pure function of its
// arguments so that every checkpoint is scored on the same examples.
Sample TestInstance(Task task, int length, uint64_t seed, int index, const TaskOptions& options = {});
TextInstance TestTextInstance(Task task, int length, uint64_t seed, int index, const TaskOptions& options = {});

// One JSONL line: {"input":..,"target":..,"task":..,"length":..}.
std::string ToJsonLine(const TextInstance& instance);

}  // namespace lenxfer

#endif  // LENXFER_INSTANCE_H_
