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

#include "lenxfer/corpus.h"

#include <algorithm>
#include <istream>
#include <ostream>

namespace lenxfer {
namespace {

std::vector<std::string> CanonicalTokens() {
  std::vector<std::string> tokens = {"<pad>", "<bos>", "<eos>"};
  for (char c = '0'; c <= '9'; ++c) tokens.emplace_back(1, c);
  for (char c = 'a'; c <= 'z'; ++c) tokens.emplace_back(1, c);
  for (char c = 'A'; c <= 'Z'; ++c) tokens.emplace_back(1, c);
  for (char c : std::string_view("+-*=;?>:, ")) tokens.emplace_back(1, c);
  for (int k = 1; k <= Vocab::kNumNodeTokens; ++k) {
    tokens.push_back("[" + std::to_string(k) + "]");
  }
  return tokens;
}

}  // namespace

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (size_t i = 0; i < tokens_.size(); ++i) {
    auto [it, inserted] = ids_.emplace(tokens_[i], static_cast<int>(i));
    if (!inserted) throw std::invalid_argument("duplicate token: " + tokens_[i]);
  }
}

const Vocab& Vocab::Get() {
  static const Vocab vocab(CanonicalTokens());
  return vocab;
}

Vocab Vocab::Load(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) tokens.push_back(line);
  return Vocab(std::move(tokens));
}

int Vocab::Id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) throw UnknownToken("unknown token: '" + std::string(token) + "'");
  return it->second;
}

bool Vocab::Contains(std::string_view token) const {
  return ids_.count(std::string(token)) > 0;
}

const std::string& Vocab::Token(int id) const {
  if (id < 0 || id >= size()) throw UnknownToken("token id out of range: " + std::to_string(id));
  return tokens_[static_cast<size_t>(id)];
}

std::vector<int> Vocab::Encode(std::string_view text) const {
  std::vector<int> ids;
  ids.reserve(text.size());
  size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '[' || c == '<') {
      const char close = c == '[' ? ']' : '>';
      const size_t end = text.find(close, pos + 1);
      // '<' only opens a special token; a bare '>' is the query symbol.
      if (end == std::string_view::npos) {
        throw UnknownToken("unterminated token at offset " + std::to_string(pos));
      }
      ids.push_back(Id(text.substr(pos, end - pos + 1)));
      pos = end + 1;
      continue;
    }
    ids.push_back(Id(text.substr(pos, 1)));
    ++pos;
  }
  return ids;
}

std::string Vocab::Decode(std::span<const int> ids) const {
  std::string out;
  for (int id : ids) out += Token(id);
  return out;
}

void Vocab::Dump(std::ostream& out) const {
  for (const auto& token : tokens_) out << token << '\n';
}

std::vector<int> Sample::Sequence(const Vocab& vocab) const {
  std::vector<int> seq;
  seq.reserve(1 + input.size() + target.size());
  seq.push_back(vocab.bos());
  seq.insert(seq.end(), input.begin(), input.end());
  seq.insert(seq.end(), target.begin(), target.end());
  return seq;
}

std::vector<uint8_t> MakeLossMask(const Sample& sample, const Vocab& vocab) {
  std::vector<uint8_t> mask(sample.input.size() + sample.target.size(), 0);
  const size_t offset = sample.input.size();
  if (sample.task != Task::kMqar) {
    std::fill(mask.begin() + static_cast<std::ptrdiff_t>(offset), mask.end(), 1);
    return mask;
  }
  const int separator = vocab.Id(";");
  for (size_t i = 1; i < sample.target.size(); ++i) {
    if (sample.target[i] == separator && sample.target[i - 1] != separator) {
      mask[offset + i - 1] = 1;
    }
  }
  return mask;
}

}  // namespace lenxfer
