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

#include "lenxfer/instance.h"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "lenxfer/tasks_arith.h"
#include "lenxfer/tasks_maze.h"

namespace lenxfer {

int MinLength(Task task, const TaskOptions& options) {
  if (task == Task::kMqar) return options.mqar.query_width + 1;
  if (IsMaze(task)) return 2;
  return 1;
}

TextInstance SampleTextInstance(Task task, int length, const TaskOptions& options, Rng& rng) {
  TextInstance out;
  out.task = task;
  out.length = length;
  if (IsArithmetic(task)) {
    const ArithInstance inst = SampleArithInstance(task, length, rng);
    out.input = inst.Input();
    out.target = inst.Target();
  } else if (IsString(task)) {
    const StringInstance inst = SampleStringInstance(task, length, options.mqar, rng);
    out.input = inst.Input();
    out.target = inst.Target();
  } else if (task == Task::kShortestPath) {
    MazeInstance inst = SampleShortestPathInstance(length, rng);
    out.input = std::move(inst.input);
    out.target = std::move(inst.target);
  } else {
    MazeInstance inst = SampleDfsInstance(length, rng);
    out.input = std::move(inst.input);
    out.target = std::move(inst.target);
  }
  return out;
}

Sample EncodeInstance(const TextInstance& instance, const Vocab& vocab) {
  Sample s;
  s.task = instance.task;
  s.length = instance.length;
  s.input = vocab.Encode(instance.input);
  s.target = vocab.Encode(instance.target);
  s.target.push_back(vocab.eos());
  return s;
}

TextInstance TestTextInstance(Task task, int length, uint64_t seed, int index, const TaskOptions& options) {
  // The leading tag keeps test streams apart from the training data stream.
  Rng rng = Rng::Stream(seed, {0x7e57'5e7ULL, static_cast<uint64_t>(task),
                               static_cast<uint64_t>(length), static_cast<uint64_t>(index)});
  return SampleTextInstance(task, length, options, rng);
}

Sample TestInstance(Task task, int length, uint64_t seed, int index, const TaskOptions& options) {
  return EncodeInstance(TestTextInstance(task, length, seed, index, options));
}

std::string ToJsonLine(const TextInstance& instance) {
  nlohmann::ordered_json j;
  j["input"] = instance.input;
  j["target"] = instance.target;
  j["task"] = std::string(TaskName(instance.task));
  j["length"] = instance.length;
  return j.dump();
}

}  // namespace lenxfer
