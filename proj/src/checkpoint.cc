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

#include "lenxfer/checkpoint.h"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace lenxfer {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'L', 'X', 'C', 'K', 'P', 'T', '\0', '\0'};
constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

class Writer {
 public:
  void Bytes(const void* p, size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  template <typename T>
  void Pod(T v) {
    Bytes(&v, sizeof v);
  }
  void String(const std::string& s) {
    Pod<uint64_t>(s.size());
    Bytes(s.data(), s.size());
  }
  const std::vector<char>& buffer() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(const std::vector<char>& buf, size_t end) : buf_(buf), end_(end) {}
  void Bytes(void* p, size_t n) {
    if (n > end_ - pos_) throw CorruptCheckpoint("checkpoint truncated");
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  template <typename T>
  T Pod() {
    T v;
    Bytes(&v, sizeof v);
    return v;
  }
  std::string String() {
    const auto n = Pod<uint64_t>();
    if (n > end_ - pos_) throw CorruptCheckpoint("checkpoint truncated");
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == end_; }

 private:
  const std::vector<char>& buf_;
  size_t end_;
  size_t pos_ = 0;
};

uint64_t Fnv1a(const char* data, size_t n) {
  uint64_t h = kFnvOffset;
  for (size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= kFnvPrime;
  }
  return h;
}

void WriteConfig(Writer& w, const ModelConfig& c) {
  w.Pod<int32_t>(c.layers);
  w.Pod<int32_t>(c.heads);
  w.Pod<int32_t>(c.embed_dim);
  w.Pod<int32_t>(c.mlp_hidden);
  w.Pod<int32_t>(c.vocab_size);
  w.Pod<int32_t>(c.max_seq_len);
  w.Pod<int32_t>(c.position == PositionMode::kRope ? 0 : 1);
  w.Pod<double>(c.rope_base);
}

ModelConfig ReadConfig(Reader& r) {
  ModelConfig c;
  c.layers = r.Pod<int32_t>();
  c.heads = r.Pod<int32_t>();
  c.embed_dim = r.Pod<int32_t>();
  c.mlp_hidden = r.Pod<int32_t>();
  c.vocab_size = r.Pod<int32_t>();
  c.max_seq_len = r.Pod<int32_t>();
  const auto pos = r.Pod<int32_t>();
  if (pos != 0 && pos != 1) throw CorruptCheckpoint("bad position mode");
  c.position = pos == 0 ? PositionMode::kRope : PositionMode::kNope;
  c.rope_base = r.Pod<double>();
  try {
    c.Validate();
  } catch (const std::exception& e) {
    throw CorruptCheckpoint(std::string("bad model config: ") + e.what());
  }
  return c;
}

void WriteTensors(Writer& w, const ModelParams<float>& p) {
  const auto tensors = p.Tensors();
  w.Pod<uint32_t>(static_cast<uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    w.String(t.name);
    w.Pod<int64_t>(t.rows);
    w.Pod<int64_t>(t.cols);
    w.Bytes(t.data, t.size() * sizeof(float));
  }
}

void ReadTensors(Reader& r, ModelParams<float>& p) {
  auto tensors = p.Tensors();
  if (r.Pod<uint32_t>() != tensors.size()) throw CorruptCheckpoint("tensor count mismatch");
  for (auto& t : tensors) {
    const std::string name = r.String();
    const auto rows = r.Pod<int64_t>();
    const auto cols = r.Pod<int64_t>();
    if (name != t.name || rows != t.rows || cols != t.cols) {
      throw CorruptCheckpoint("unexpected tensor '" + name + "'");
    }
    r.Bytes(t.data, t.size() * sizeof(float));
  }
}

}  // namespace

void WriteCheckpoint(std::ostream& out, const Checkpoint& ckpt) {
  Writer w;
  w.Bytes(kMagic, sizeof kMagic);
  w.Pod<uint32_t>(kCheckpointVersion);
  WriteConfig(w, ckpt.params.config);
  w.Pod<int64_t>(ckpt.iteration);
  w.Pod<uint64_t>(ckpt.data_seed);
  w.Pod<uint64_t>(ckpt.model_seed);
  w.Pod<double>(ckpt.loss_sum);
  w.Pod<int64_t>(ckpt.loss_count);
  w.String(ckpt.run_config);
  const auto& hp = ckpt.optimizer.hp;
  w.Pod<double>(hp.beta1);
  w.Pod<double>(hp.beta2);
  w.Pod<double>(hp.eps);
  w.Pod<double>(hp.weight_decay);
  w.Pod<int64_t>(ckpt.optimizer.step);
  WriteTensors(w, ckpt.params);
  WriteTensors(w, ckpt.optimizer.m);
  WriteTensors(w, ckpt.optimizer.v);
  const uint64_t sum = Fnv1a(w.buffer().data(), w.buffer().size());
  w.Pod<uint64_t>(sum);
  out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
  if (!out) throw std::runtime_error("checkpoint write failed");
}

Checkpoint ReadCheckpoint(std::istream& in) {
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < sizeof kMagic + sizeof(uint32_t) + sizeof(uint64_t)) {
    throw CorruptCheckpoint("checkpoint truncated");
  }
  if (std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) throw CorruptCheckpoint("not a checkpoint file");
  uint32_t version;
  std::memcpy(&version, buf.data() + sizeof kMagic, sizeof version);
  if (version != kCheckpointVersion) {
    throw VersionMismatch("checkpoint version " + std::to_string(version) + ", expected " +
                          std::to_string(kCheckpointVersion));
  }
  const size_t body = buf.size() - sizeof(uint64_t);
  uint64_t stored;
  std::memcpy(&stored, buf.data() + body, sizeof stored);
  if (stored != Fnv1a(buf.data(), body)) throw CorruptCheckpoint("checkpoint checksum mismatch");

  Reader r(buf, body);
  char magic[sizeof kMagic];
  r.Bytes(magic, sizeof magic);
  r.Pod<uint32_t>();
  Checkpoint c;
  const ModelConfig config = ReadConfig(r);
  c.iteration = r.Pod<int64_t>();
  c.data_seed = r.Pod<uint64_t>();
  c.model_seed = r.Pod<uint64_t>();
  c.loss_sum = r.Pod<double>();
  c.loss_count = r.Pod<int64_t>();
  c.run_config = r.String();
  AdamWConfig hp;
  hp.beta1 = r.Pod<double>();
  hp.beta2 = r.Pod<double>();
  hp.eps = r.Pod<double>();
  hp.weight_decay = r.Pod<double>();
  c.params = ModelParams<float>::Zeros(config);
  c.optimizer = OptimizerState<float>::Init(config, hp);
  c.optimizer.step = r.Pod<int64_t>();
  ReadTensors(r, c.params);
  ReadTensors(r, c.optimizer.m);
  ReadTensors(r, c.optimizer.v);
  if (!r.done()) throw CorruptCheckpoint("trailing bytes in checkpoint");
  return c;
}

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    WriteCheckpoint(out, ckpt);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  return ReadCheckpoint(in);
}

std::string CheckpointFileName(int64_t iteration) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ckpt_%08lld.bin", static_cast<long long>(iteration));
  return buf;
}

}  // namespace lenxfer
