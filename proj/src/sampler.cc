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

#include "lenxfer/sampler.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace lenxfer {
namespace {

struct BuiltinSpec {
  std::string_view name;
  std::vector<GroupMember> members;
};

std::vector<BuiltinSpec> Builtins() {
  using T = Task;
  using R = Role;
  return {
      {"add_carry", {{T::kReverseAdd, 1, 16, R::kMain}, {T::kNoCarry, 1, 32, R::kAuxiliary},
                     {T::kCarryOnly, 1, 32, R::kAuxiliary}}},
      {"add_sub", {{T::kReverseAdd, 1, 16, R::kMain}, {T::kReverseSubtract, 1, 32, R::kAuxiliary}}},
      {"add_mul", {{T::kReverseAdd, 1, 8, R::kMain}, {T::kCotMultiply, 1, 16, R::kAuxiliary}}},
      {"copy_mqar", {{T::kStringCopy, 1, 16, R::kMain}, {T::kMqar, 4, 32, R::kAuxiliary}}},
      {"capitalize_reverse", {{T::kCapitalizeReverse, 1, 16, R::kMain},
                              {T::kCapitalize, 1, 32, R::kAuxiliary},
                              {T::kReverse, 1, 32, R::kAuxiliary}}},
      {"maze", {{T::kDfsTrace, 2, 32, R::kMain}, {T::kShortestPath, 2, 64, R::kAuxiliary}}},
      {"control_add_copy_first_op", {{T::kReverseAdd, 1, 16, R::kMain},
                                     {T::kCopyFirstOp, 1, 32, R::kControl}}},
      {"control_copy_reverse", {{T::kStringCopy, 1, 16, R::kMain}, {T::kReverse, 1, 32, R::kControl}}},
  };
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kMain:
      return "main";
    case Role::kAuxiliary:
      return "auxiliary";
    case Role::kControl:
      return "control";
  }
  return "main";
}

Role RoleFromName(std::string_view name) {
  if (name == "main") return Role::kMain;
  if (name == "auxiliary" || name == "aux") return Role::kAuxiliary;
  if (name == "control") return Role::kControl;
  throw std::invalid_argument("unknown role: " + std::string(name));
}

void TaskGroup::Validate() const {
  if (members.empty()) throw std::invalid_argument("task group has no members");
  int mains = 0;
  for (const auto& m : members) {
    if (m.min_length > m.max_length) throw std::invalid_argument("empty length range");
    if (m.min_length < MinLength(m.task, options)) {
      throw std::invalid_argument(std::string(TaskName(m.task)) + " needs length >= " +
                                  std::to_string(MinLength(m.task, options)));
    }
    if (IsMaze(m.task) && m.max_length > Vocab::kNumNodeTokens) {
      throw std::invalid_argument("maze length exceeds the node vocabulary");
    }
    mains += m.role == Role::kMain;
  }
  if (mains != 1) throw std::invalid_argument("task group needs exactly one main member");
}

const GroupMember& TaskGroup::Main() const {
  for (const auto& m : members) {
    if (m.role == Role::kMain) return m;
  }
  throw std::invalid_argument("task group has no main member");
}

const GroupMember* TaskGroup::Find(Task task) const {
  for (const auto& m : members) {
    if (m.task == task) return &m;
  }
  return nullptr;
}

TaskGroup BuiltinGroup(std::string_view name) {
  for (auto& spec : Builtins()) {
    if (spec.name == name) {
      TaskGroup g;
      g.name = std::string(name);
      g.members = spec.members;
      return g;
    }
  }
  // Single-task group named after the task.
  const Task task = TaskFromName(name);
  TaskGroup g;
  g.name = std::string(name);
  g.members = {{task, MinLength(task), IsMaze(task) ? 32 : 16, Role::kMain}};
  return g;
}

std::vector<std::string> BuiltinGroupNames() {
  std::vector<std::string> names;
  for (const auto& spec : Builtins()) names.emplace_back(spec.name);
  return names;
}

TaskGroup WithTrainLengths(const TaskGroup& group, int main_max, int aux_max) {
  TaskGroup out = group;
  for (auto& m : out.members) {
    m.max_length = m.role == Role::kMain ? main_max : aux_max;
    if (IsMaze(m.task)) m.max_length = std::min(m.max_length, Vocab::kNumNodeTokens);
    m.min_length = std::min(m.min_length, m.max_length);
  }
  return out;
}

TaskGroup ParseTaskGroup(std::string_view text) {
  TaskGroup g;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string value(Trim(line.substr(eq + 1)));
    if (key == "member") {
      std::istringstream fields(value);
      std::string task, role;
      GroupMember m;
      if (!(fields >> task >> m.min_length >> m.max_length >> role)) {
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": member = <task> <min> <max> <role>");
      }
      m.task = TaskFromName(task);
      m.role = RoleFromName(role);
      g.members.push_back(m);
    } else if (key == "name") {
      g.name = value;
    } else if (key == "task_draw") {
      if (value != "per_example" && value != "per_batch") {
        throw std::invalid_argument("task_draw must be per_example or per_batch");
      }
      g.per_batch_task = value == "per_batch";
    } else if (key == "mqar_query_width") {
      g.options.mqar.query_width = std::stoi(value);
    } else if (key == "mqar_num_queries") {
      g.options.mqar.num_queries = std::stoi(value);
    } else if (key == "group") {
      TaskGroup base = BuiltinGroup(value);
      g.name = g.name.empty() ? base.name : g.name;
      for (auto& m : base.members) g.members.push_back(m);
    }
  }
  g.Validate();
  return g;
}

Sample SampleMemberExample(const GroupMember& member, const TaskOptions& options, Rng& rng) {
  const int length = static_cast<int>(rng.UniformInt(member.min_length, member.max_length));
  return EncodeInstance(SampleTextInstance(member.task, length, options, rng));
}

Sample SampleTrainingExample(const TaskGroup& group, Rng& rng) {
  const auto& member =
      group.members[static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(group.members.size()) - 1))];
  return SampleMemberExample(member, group.options, rng);
}

int64_t Batch::MaskCount() const {
  int64_t n = 0;
  for (uint8_t m : mask) n += m;
  return n;
}

Batch MakeBatch(std::span<const Sample> samples, const Vocab& vocab) {
  if (samples.empty()) throw std::invalid_argument("MakeBatch: no samples");
  Batch b;
  b.rows = static_cast<int>(samples.size());
  for (const auto& s : samples) {
    b.width = std::max(b.width, static_cast<int>(1 + s.input.size() + s.target.size()));
  }
  b.tokens.assign(static_cast<size_t>(b.rows * b.width), vocab.pad());
  b.mask.assign(b.tokens.size(), 0);
  for (int r = 0; r < b.rows; ++r) {
    const Sample& s = samples[static_cast<size_t>(r)];
    const auto seq = s.Sequence(vocab);
    const auto mask = MakeLossMask(s, vocab);
    const size_t base = static_cast<size_t>(r * b.width);
    std::copy(seq.begin(), seq.end(), b.tokens.begin() + static_cast<std::ptrdiff_t>(base));
    // Slot 0 holds <bos>, so loss-mask entry i lands on column i + 1.
    std::copy(mask.begin(), mask.end(), b.mask.begin() + static_cast<std::ptrdiff_t>(base + 1));
    b.seq_lens.push_back(static_cast<int>(seq.size()));
    b.tasks.push_back(s.task);
    b.lengths.push_back(s.length);
  }
  return b;
}

DataStream::DataStream(TaskGroup group, uint64_t data_seed, int batch_size)
    : group_(std::move(group)), data_seed_(data_seed), batch_size_(batch_size) {
  group_.Validate();
  if (batch_size_ < 1) throw std::invalid_argument("batch size must be >= 1");
}

std::vector<Sample> DataStream::SamplesAt(int64_t iteration) const {
  std::vector<Sample> samples;
  samples.reserve(static_cast<size_t>(batch_size_));
  const GroupMember* batch_member = nullptr;
  if (group_.per_batch_task) {
    Rng rng = Rng::Stream(data_seed_, {0xba7c4ULL, static_cast<uint64_t>(iteration)});
    batch_member = &group_.members[static_cast<size_t>(
        rng.UniformInt(0, static_cast<int64_t>(group_.members.size()) - 1))];
  }
  for (int i = 0; i < batch_size_; ++i) {
    const auto index = static_cast<uint64_t>(iteration) * static_cast<uint64_t>(batch_size_) +
                       static_cast<uint64_t>(i);
    Rng rng = Rng::Stream(data_seed_, {index});
    samples.push_back(batch_member ? SampleMemberExample(*batch_member, group_.options, rng)
                                   : SampleTrainingExample(group_, rng));
  }
  return samples;
}

}  // namespace lenxfer
