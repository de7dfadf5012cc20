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

#ifndef LENXFER_SAMPLER_H_
#define LENXFER_SAMPLER_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lenxfer/corpus.h"
#include "lenxfer/instance.h"
#include "lenxfer/rng.h"

namespace lenxfer {

enum class Role { kMain, kAuxiliary, kControl };

std::string_view RoleName(Role role);
Role RoleFromName(std::string_view name);

struct GroupMember {
  Task task = Task::kReverseAdd;
  int min_length = 1;
  int max_length = 1;
  Role role = Role::kMain;
};

struct TaskGroup {
  std::string name;
  std::vector<GroupMember> members;
  // false: every example draws its own task. true: one draw per batch.
  bool per_batch_task = false;
  TaskOptions options;

  // Throws std::invalid_argument.
  void Validate() const;
  const GroupMember& Main() const;
  const GroupMember* Find(Task task) const;
};

// Built-in groups: the six main/auxiliary pairings, the two controls, and
// single-task groups named after the task. Lengths are the training maxima
// used by the reference experiments; everything starts at the task minimum.
TaskGroup BuiltinGroup(std::string_view name);
std::vector<std::string> BuiltinGroupNames();

// Group with `main` trained on [min, main_max] and every other member on
// [min, aux_max]. Used by the length sweep.
TaskGroup WithTrainLengths(const TaskGroup& group, int main_max, int aux_max);

// Parses "member = <task> <min> <max> <role>" lines plus the optional keys
// name, task_draw (per_example|per_batch), mqar_query_width and
// mqar_num_queries. '#' starts a comment. Unknown keys are ignored so the
// same file can carry run settings.
TaskGroup ParseTaskGroup(std::string_view text);

// Task uniform over members, length uniform over the member's range.
Sample SampleTrainingExample(const TaskGroup& group, Rng& rng);
Sample SampleMemberExample(const GroupMember& member, const TaskOptions& options, Rng& rng);

// Right-padded token matrix with a <bos> column in front. mask(r, t) = 1
// when token t of row r is a loss target.
struct Batch {
  int rows = 0;
  int width = 0;
  std::vector<int> tokens;
  std::vector<uint8_t> mask;
  std::vector<int> seq_lens;
  std::vector<Task> tasks;
  std::vector<int> lengths;

  int Token(int r, int t) const { return tokens[static_cast<size_t>(r * width + t)]; }
  uint8_t Mask(int r, int t) const { return mask[static_cast<size_t>(r * width + t)]; }
  int64_t MaskCount() const;
};

// Throws std::invalid_argument on an empty list.
Batch MakeBatch(std::span<const Sample> samples, const Vocab& vocab = Vocab::Get());

// Deterministic training stream. Example i of the run is drawn from its own
// RNG stream keyed by (data seed, i), so any batch can be rebuilt from the
// iteration number alone.
class DataStream {
 public:
  DataStream(TaskGroup group, uint64_t data_seed, int batch_size);

  std::vector<Sample> SamplesAt(int64_t iteration) const;
  Batch BatchAt(int64_t iteration) const { return MakeBatch(SamplesAt(iteration)); }

  const TaskGroup& group() const { return group_; }
  int batch_size() const { return batch_size_; }

 private:
  TaskGroup group_;
  uint64_t data_seed_;
  int batch_size_;
};

}  // namespace lenxfer

#endif  // LENXFER_SAMPLER_H_
