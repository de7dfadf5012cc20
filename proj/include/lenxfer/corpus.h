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

#ifndef LENXFER_CORPUS_H_
#define LENXFER_CORPUS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lenxfer/task.h"

namespace lenxfer {

class UnknownToken : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed token vocabulary shared by every task.
//
// Id order: specials (<pad> <bos> <eos>), digits, lowercase, uppercase,
// the symbols "+-*=;?>:," followed by space, and the maze node tokens
// [1] ... [64]. Ids are dense, so checkpoints stay portable.
class Vocab {
 public:
  static constexpr int kNumNodeTokens = 64;

  // The canonical vocabulary. Built once; immutable afterwards.
  static const Vocab& Get();

  // Reads a vocab.txt dump (one token per line, line number = id).
  static Vocab Load(std::istream& in);

  int size() const { return static_cast<int>(tokens_.size()); }
  int pad() const { return 0; }
  int bos() const { return 1; }
  int eos() const { return 2; }

  // Throws UnknownToken.
  int Id(std::string_view token) const;
  bool Contains(std::string_view token) const;
  const std::string& Token(int id) const;

  // Greedy tokenization; bracketed node tokens and <special> tokens are
  // matched as whole units. Throws UnknownToken.
  std::vector<int> Encode(std::string_view text) const;
  std::string Decode(std::span<const int> ids) const;

  void Dump(std::ostream& out) const;

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  explicit Vocab(std::vector<std::string> tokens);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

// One training or evaluation example. The model sees
// <bos> input target, where target already ends with <eos>.
struct Sample {
  std::vector<int> input;
  std::vector<int> target;
  Task task = Task::kReverseAdd;
  int length = 0;

  // <bos> + input + target.
  std::vector<int> Sequence(const Vocab& vocab) const;
};

// Loss mask over input ++ target (no <bos> slot): zeros on the prompt, ones
// on the answer. For MQAR only the answer character in front of each ';'
// carries loss; query echoes, separators and <eos> are masked out.
std::vector<uint8_t> MakeLossMask(const Sample& sample, const Vocab& vocab);

}  // namespace lenxfer

#endif  // LENXFER_CORPUS_H_
