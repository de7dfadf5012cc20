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

#include "lenxfer/eval.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <set>
#include <string>

#include "lenxfer/tasks_maze.h"

namespace lenxfer {
namespace {

Batch DecodeBatch(const std::vector<std::vector<int>>& seqs, const Vocab& vocab) {
  Batch b;
  b.rows = static_cast<int>(seqs.size());
  for (const auto& s : seqs) b.width = std::max(b.width, static_cast<int>(s.size()));
  b.tokens.assign(static_cast<size_t>(b.rows * b.width), vocab.pad());
  b.mask.assign(b.tokens.size(), 0);
  for (int r = 0; r < b.rows; ++r) {
    const auto& s = seqs[static_cast<size_t>(r)];
    std::copy(s.begin(), s.end(), b.tokens.begin() + static_cast<std::ptrdiff_t>(r * b.width));
    b.seq_lens.push_back(static_cast<int>(s.size()));
    b.tasks.push_back(Task::kReverseAdd);
    b.lengths.push_back(0);
  }
  return b;
}

// Semantic score for one DFS test example: the decoded answer is any legal
// trace for the maze in the prompt.
bool DfsTraceIsValid(const Sample& sample, const std::vector<int>& decoded, const Vocab& vocab) {
  std::vector<int> answer = decoded;
  if (answer.empty() || answer.back() != vocab.eos()) return false;
  answer.pop_back();
  try {
    const MazeGraph g = ParseMaze(vocab.Decode(sample.input));
    return ValidateDfsTrace(g, g.start, g.goal, DfsTrace::Parse(vocab.Decode(answer)));
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

LogitFn ModelLogits(const ModelParams<float>& params) {
  return [&params](const Batch& batch) { return Forward(params, batch).logits; };
}

int ArgmaxLowest(const Eigen::Ref<const Eigen::Matrix<float, 1, Eigen::Dynamic>>& row) {
  int best = 0;
  for (Eigen::Index i = 1; i < row.size(); ++i) {
    if (row(i) > row(best)) best = static_cast<int>(i);
  }
  return best;
}

std::vector<uint8_t> TeacherForcedExactMatch(const Matrix<float>& logits, const Batch& batch) {
  std::vector<uint8_t> ok(static_cast<size_t>(batch.rows), 1);
  for (int r = 0; r < batch.rows; ++r) {
    for (int t = 1; t < batch.width && ok[static_cast<size_t>(r)]; ++t) {
      if (!batch.Mask(r, t)) continue;
      const auto row = static_cast<Eigen::Index>(r) * batch.width + t - 1;
      if (ArgmaxLowest(logits.row(row)) != batch.Token(r, t)) ok[static_cast<size_t>(r)] = 0;
    }
  }
  return ok;
}

std::vector<std::vector<int>> GreedyDecodeBatch(const LogitFn& model, const std::vector<std::vector<int>>& prompts,
                                                int max_new_tokens, int max_context, const Vocab& vocab) {
  std::vector<std::vector<int>> seqs = prompts;
  std::vector<std::vector<int>> out(prompts.size());
  std::vector<bool> done(prompts.size(), max_new_tokens <= 0);
  for (const auto& p : prompts) {
    if (static_cast<int>(p.size()) > max_context) throw ContextOverflow("prompt exceeds the context window");
  }
  for (int step = 0; step < max_new_tokens; ++step) {
    std::vector<size_t> active;
    std::vector<std::vector<int>> live;
    for (size_t i = 0; i < seqs.size(); ++i) {
      if (done[i] || static_cast<int>(seqs[i].size()) >= max_context) continue;
      active.push_back(i);
      live.push_back(seqs[i]);
    }
    if (active.empty()) break;
    const Batch batch = DecodeBatch(live, vocab);
    const Matrix<float> logits = model(batch);
    for (size_t k = 0; k < active.size(); ++k) {
      const size_t i = active[k];
      const auto row = static_cast<Eigen::Index>(k) * batch.width + batch.seq_lens[k] - 1;
      const int next = ArgmaxLowest(logits.row(row));
      seqs[i].push_back(next);
      out[i].push_back(next);
      if (next == vocab.eos() || static_cast<int>(out[i].size()) >= max_new_tokens) done[i] = true;
    }
  }
  return out;
}

std::vector<int> GreedyDecode(const LogitFn& model, std::span<const int> prompt, int max_new_tokens, int max_context,
                              const Vocab& vocab) {
  return GreedyDecodeBatch(model, {std::vector<int>(prompt.begin(), prompt.end())}, max_new_tokens, max_context,
                           vocab)
      .front();
}

std::vector<Sample> BuildTestSet(Task task, int length, const EvalOptions& options) {
  std::vector<Sample> out;
  out.reserve(static_cast<size_t>(options.examples));
  for (int i = 0; i < options.examples; ++i) {
    out.push_back(TestInstance(task, length, options.seed, i, options.task_options));
  }
  return out;
}

CurvePoint EvaluateLength(const LogitFn& model, Task task, int length, const EvalOptions& options) {
  const Vocab& vocab = Vocab::Get();
  const auto samples = BuildTestSet(task, length, options);
  CurvePoint point;
  point.length = length;
  point.examples = static_cast<int>(samples.size());
  if (samples.empty()) return point;
  int64_t correct = 0, valid = 0;
  const auto chunk = static_cast<size_t>(std::max(1, options.chunk));
  for (size_t begin = 0; begin < samples.size(); begin += chunk) {
    const size_t end = std::min(samples.size(), begin + chunk);
    const std::span<const Sample> part(samples.data() + begin, end - begin);
    const Batch batch = MakeBatch(part, vocab);
    for (uint8_t ok : TeacherForcedExactMatch(model(batch), batch)) correct += ok;
    if (options.semantic && task == Task::kDfsTrace) {
      std::vector<std::vector<int>> prompts;
      int max_new = 0;
      for (const auto& s : part) {
        std::vector<int> p = {vocab.bos()};
        p.insert(p.end(), s.input.begin(), s.input.end());
        prompts.push_back(std::move(p));
        max_new = std::max(max_new, 2 * static_cast<int>(s.target.size()));
      }
      const auto decoded = GreedyDecodeBatch(model, prompts, max_new, options.max_context, vocab);
      for (size_t k = 0; k < part.size(); ++k) valid += DfsTraceIsValid(part[k], decoded[k], vocab);
    }
  }
  point.accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
  if (options.semantic && task == Task::kDfsTrace) {
    point.semantic = static_cast<double>(valid) / static_cast<double>(samples.size());
  }
  return point;
}

double AccuracyAtLength(const LogitFn& model, Task task, int length, const EvalOptions& options) {
  return EvaluateLength(model, task, length, options).accuracy;
}

AccuracyCurve ComputeAccuracyCurve(const LogitFn& model, Task task, std::span<const int> lengths,
                                   const EvalOptions& options, int64_t iteration) {
  AccuracyCurve curve;
  curve.task = task;
  curve.iteration = iteration;
  for (size_t i = 0; i < lengths.size(); ++i) {
    if (i > 0 && lengths[i] <= lengths[i - 1]) {
      throw std::invalid_argument("curve lengths must be strictly increasing");
    }
    curve.points.push_back(EvaluateLength(model, task, lengths[i], options));
  }
  return curve;
}

double AccuracyCurve::At(int length) const {
  for (const auto& p : points) {
    if (p.length == length) return p.accuracy;
  }
  throw MissingLength("curve for " + std::string(TaskName(task)) + " has no length " + std::to_string(length));
}

double GeneralizationGap(const AccuracyCurve& main, const AccuracyCurve& aux, std::span<const int> lengths,
                         GapMode mode) {
  if (lengths.empty()) throw MissingLength("no evaluation lengths");
  double total = 0;
  for (int len : lengths) {
    const double diff = aux.At(len) - main.At(len);
    total += mode == GapMode::kClamped ? std::clamp(diff, 0.0, 1.0) : std::min(std::abs(diff), 1.0);
  }
  return total / static_cast<double>(lengths.size());
}

std::vector<int> DefaultGapLengths(const TaskGroup& group) {
  int longest = 0;
  for (const auto& m : group.members) {
    if (m.role != Role::kMain) longest = std::max(longest, m.max_length);
  }
  if (longest == 0) longest = group.Main().max_length;
  std::vector<int> out;
  for (int len = 1; len <= longest + 4; ++len) out.push_back(len);
  return out;
}

std::vector<int> ParseLengths(std::string_view spec) {
  std::vector<int> out;
  auto parse_int = [](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw std::invalid_argument("bad length list entry: '" + std::string(s) + "'");
    }
    return v;
  };
  size_t pos = 0;
  while (pos < spec.size()) {
    size_t end = spec.find(',', pos);
    if (end == std::string_view::npos) end = spec.size();
    const std::string_view item = spec.substr(pos, end - pos);
    if (const size_t colon = item.find(':'); colon != std::string_view::npos) {
      const int lo = parse_int(item.substr(0, colon)), hi = parse_int(item.substr(colon + 1));
      if (lo > hi) throw std::invalid_argument("empty length range");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_int(item));
    }
    pos = end + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void WriteCurveCsv(std::ostream& out, std::span<const AccuracyCurve> curves, bool header) {
  if (header) out << "task,iter,length,n,exact_match,semantic_match\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << TaskName(c.task) << ',' << c.iteration << ',' << p.length << ',' << p.examples << ',' << p.accuracy
          << ',';
      if (p.semantic) out << *p.semantic;
      out << '\n';
    }
  }
}

int64_t CountTrainTestCollisions(const DataStream& stream, int64_t iterations, Task task, int length,
                                 const EvalOptions& options) {
  std::set<std::vector<int>> test_inputs;
  for (const auto& s : BuildTestSet(task, length, options)) test_inputs.insert(s.input);
  int64_t hits = 0;
  for (int64_t it = 0; it < iterations; ++it) {
    for (const auto& s : stream.SamplesAt(it)) {
      if (s.task == task && s.length == length) hits += test_inputs.count(s.input);
    }
  }
  return hits;
}

}  // namespace lenxfer
