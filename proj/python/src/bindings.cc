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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "lenxfer/checkpoint.h"
#include "lenxfer/corpus.h"
#include "lenxfer/eval.h"
#include "lenxfer/instance.h"
#include "lenxfer/optim.h"
#include "lenxfer/tasks_arith.h"
#include "lenxfer/tasks_maze.h"
#include "lenxfer/tasks_string.h"
#include "lenxfer/trainer.h"

namespace py = pybind11;

namespace lenxfer {
namespace {

py::dict InstanceDict(const TextInstance& inst) {
  py::dict d;
  d["task"] = std::string(TaskName(inst.task));
  d["length"] = inst.length;
  d["input"] = inst.input;
  d["target"] = inst.target;
  return d;
}

py::list CurvesToList(const std::vector<AccuracyCurve>& curves) {
  py::list out;
  for (const auto& c : curves) {
    py::dict acc;
    for (const auto& p : c.points) acc[py::int_(p.length)] = p.accuracy;
    py::dict d;
    d["task"] = std::string(TaskName(c.task));
    d["iteration"] = c.iteration;
    d["accuracy"] = acc;
    out.append(d);
  }
  return out;
}

}  // namespace
}  // namespace lenxfer

PYBIND11_MODULE(_lenxfer, m) {
  using namespace lenxfer;
  m.doc() = "Length-generalization transfer experiments";

  py::register_exception<MazeParseError>(m, "MazeParseError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CorruptCheckpoint>(m, "CorruptCheckpoint", PyExc_RuntimeError);
  py::register_exception<NonFiniteLoss>(m, "NonFiniteLoss", PyExc_RuntimeError);

  m.def("vocab_size", [] { return Vocab::Get().size(); });
  m.def("vocab_tokens", [] { return Vocab::Get().tokens(); });
  m.def("encode", [](const std::string& text) { return Vocab::Get().Encode(text); }, py::arg("text"));
  m.def("decode", [](const std::vector<int>& ids) { return Vocab::Get().Decode(ids); }, py::arg("ids"));

  m.def("solve", [](const std::string& task, const std::string& a, const std::string& b) -> std::string {
    switch (TaskFromName(task)) {
      case Task::kReverseAdd: return SolveReverseAdd(a, b);
      case Task::kNoCarry: return SolveNoCarry(a, b);
      case Task::kCarryOnly: return SolveCarryOnly(a, b);
      case Task::kReverseSubtract: return SolveReverseSubtract(a, b);
      case Task::kCotMultiply: return SolveCotMultiply(a, b);
      case Task::kCopyFirstOp: return SolveCopyFirstOp(a, b);
      case Task::kStringCopy: return SolveCopy(a);
      case Task::kReverse: return SolveReverse(a);
      case Task::kCapitalize: return SolveCapitalize(a);
      case Task::kCapitalizeReverse: return SolveCapitalizeReverse(a);
      default: throw std::invalid_argument("solve() covers arithmetic and string tasks; use the maze functions");
    }
  }, py::arg("task"), py::arg("a"), py::arg("b") = "");

  m.def("sample", [](const std::string& task, int length, uint64_t seed) {
    Rng rng(seed);
    return InstanceDict(SampleTextInstance(TaskFromName(task), length, {}, rng));
  }, py::arg("task"), py::arg("length"), py::arg("seed") = 0);
  m.def("test_instance", [](const std::string& task, int length, uint64_t seed, int index) {
    return InstanceDict(TestTextInstance(TaskFromName(task), length, seed, index));
  }, py::arg("task"), py::arg("length"), py::arg("seed") = 1234, py::arg("index") = 0);

  m.def("shortest_path", [](const std::string& maze) {
    const MazeGraph g = ParseMaze(maze);
    return RenderNodes(TreeShortestPath(g, g.start, g.goal));
  }, py::arg("maze"));
  m.def("validate_dfs_trace", [](const std::string& maze, const std::string& trace) {
    const MazeGraph g = ParseMaze(maze);
    return ValidateDfsTrace(g, g.start, g.goal, DfsTrace::Parse(trace));
  }, py::arg("maze"), py::arg("trace"));

  m.def("learning_rate", [](const std::string& schedule, int64_t iteration) {
    return FindSchedulePreset(schedule).lr.At(iteration);
  }, py::arg("schedule"), py::arg("iteration"));

  m.def("generalization_gap", [](const std::vector<double>& main, const std::vector<double>& aux) {
    if (main.size() != aux.size()) throw std::invalid_argument("curves differ in length");
    AccuracyCurve a, b;
    std::vector<int> lengths;
    for (size_t i = 0; i < main.size(); ++i) {
      const int len = static_cast<int>(i) + 1;
      a.points.push_back({len, main[i], 1, {}});
      b.points.push_back({len, aux[i], 1, {}});
      lengths.push_back(len);
    }
    return GeneralizationGap(a, b, lengths);
  }, py::arg("main"), py::arg("aux"), "Mean over lengths 1..n of clamp(aux - main, 0, 1).");

  m.def("canonical_config", [](const std::string& text) { return RunConfig::Parse(text).ToText(); },
        py::arg("text"));

  m.def("train", [](const std::string& config_text, const std::string& out_dir, int64_t stop_at,
                    const std::string& resume_from) {
    TrainOptions opts;
    opts.stop_at = stop_at;
    opts.resume_from = resume_from;
    TrainResult r;
    {
      py::gil_scoped_release release;
      r = TrainRun(RunConfig::Parse(config_text), out_dir, opts);
    }
    py::dict d;
    d["iterations"] = r.iterations;
    d["finished"] = r.finished;
    d["checkpoints"] = r.checkpoints;
    d["last_loss"] = r.last_loss;
    d["curves"] = CurvesToList(r.final_curves);
    return d;
  }, py::arg("config"), py::arg("out_dir"), py::arg("stop_at") = -1, py::arg("resume_from") = "");

  m.def("evaluate_checkpoint", [](const std::string& path, const std::string& task, const std::vector<int>& lengths,
                                  int examples) {
    const Checkpoint ckpt = LoadCheckpoint(path);
    EvalOptions o;
    o.examples = examples;
    std::vector<AccuracyCurve> curves;
    {
      py::gil_scoped_release release;
      curves.push_back(ComputeAccuracyCurve(ModelLogits(ckpt.params), TaskFromName(task), lengths, o));
      curves.back().iteration = ckpt.iteration;
    }
    const py::list out = CurvesToList(curves);
    return py::object(out[0]);
  }, py::arg("checkpoint"), py::arg("task"), py::arg("lengths"), py::arg("examples") = 256);
}
