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

#ifndef LENXFER_MODEL_H_
#define LENXFER_MODEL_H_

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lenxfer/sampler.h"

namespace lenxfer {

class SequenceTooLong : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyMask : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OddHeadDim : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class PositionMode { kRope, kNope };

std::string_view PositionModeName(PositionMode mode);
PositionMode PositionModeFromName(std::string_view name);

// Llama-style decoder: pre-norm RMSNorm blocks, causal multi-head attention
// with optional rotary encoding, SwiGLU MLP, no biases, untied unembedding.
struct ModelConfig {
  int layers = 6;
  int heads = 6;
  int embed_dim = 384;
  // 0 selects 8/3 * embed_dim rounded up to a multiple of 8.
  int mlp_hidden = 0;
  int vocab_size = 139;
  int max_seq_len = 1024;
  PositionMode position = PositionMode::kRope;
  double rope_base = 10000.0;

  int HeadDim() const { return embed_dim / heads; }
  int HiddenDim() const;
  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Flat view of one named parameter tensor.
template <typename S>
struct TensorRef {
  std::string name;
  S* data = nullptr;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  // Weight decay applies to projection matrices only, not norm gains.
  bool decay = true;

  size_t size() const { return static_cast<size_t>(rows * cols); }
  std::span<S> span() const { return {data, size()}; }
};

template <typename S>
struct LayerParams {
  Matrix<S> attn_norm;  // 1 x D
  Matrix<S> wq, wk, wv, wo;  // D x D
  Matrix<S> mlp_norm;  // 1 x D
  Matrix<S> w_gate, w_up;  // D x F
  Matrix<S> w_down;  // F x D
};

template <typename S>
struct ModelParams {
  ModelConfig config;
  Matrix<S> embedding;  // V x D
  std::vector<LayerParams<S>> layers;
  Matrix<S> final_norm;  // 1 x D
  Matrix<S> unembedding;  // D x V

  static ModelParams Zeros(const ModelConfig& config);

  // Stable order; names look like "layers.3.wq".
  std::vector<TensorRef<S>> Tensors();
  std::vector<TensorRef<const S>> Tensors() const;
  int64_t NumParameters() const;

  template <typename T>
  ModelParams<T> Cast() const {
    ModelParams<T> out;
    out.config = config;
    out.embedding = embedding.template cast<T>();
    out.final_norm = final_norm.template cast<T>();
    out.unembedding = unembedding.template cast<T>();
    for (const auto& l : layers) {
      out.layers.push_back({l.attn_norm.template cast<T>(), l.wq.template cast<T>(),
                            l.wk.template cast<T>(), l.wv.template cast<T>(),
                            l.wo.template cast<T>(), l.mlp_norm.template cast<T>(),
                            l.w_gate.template cast<T>(), l.w_up.template cast<T>(),
                            l.w_down.template cast<T>()});
    }
    return out;
  }
};

// Normal(0, 0.02) weights; wo and w_down additionally scaled by
// 1/sqrt(2 * layers); norm gains start at 1. Deterministic in seed.
template <typename S>
ModelParams<S> InitParams(const ModelConfig& config, uint64_t seed);

// Rotates coordinate pairs (2i, 2i+1) of row p by positions[p] * base^(-2i/d).
// `inverse` rotates by the negated angle. Throws OddHeadDim.
template <typename S>
Matrix<S> RopeRotate(const Matrix<S>& vectors, std::span<const int> positions, double base,
                     bool inverse = false);

// Replaces the output of one attention head (before the output projection)
// with fixed per-position vectors: row t of `values` is written at position
// t of every batch row. Positions past values.rows() are left alone.
template <typename S>
struct HeadPatch {
  int layer = 0;
  int head = 0;
  Matrix<S> values;
};

template <typename S>
struct ForwardOptions {
  bool capture_attention = false;
  bool capture_head_outputs = false;
  const HeadPatch<S>* patch = nullptr;
};

template <typename S>
struct ForwardResult {
  // (rows * width) x vocab; row r * width + t holds the prediction for t + 1.
  Matrix<S> logits;
  // Index layer * heads + head; (rows * width) x width, causal and
  // row-stochastic on the valid prefix of every batch row, zero elsewhere.
  std::vector<Matrix<S>> attention;
  // Per layer: concatenated head outputs, (rows * width) x embed_dim.
  std::vector<Matrix<S>> head_outputs;
};

// Throws SequenceTooLong, std::out_of_range for bad token ids.
template <typename S>
ForwardResult<S> Forward(const ModelParams<S>& params, const Batch& batch,
                         const ForwardOptions<S>& options = {});

// Mean next-token cross-entropy over positions with mask = 1. Throws EmptyMask.
template <typename S>
S MaskedLoss(const Matrix<S>& logits, const Batch& batch);

template <typename S>
struct LossAndGrads {
  S loss = 0;
  ModelParams<S> grads;
};

// Exact gradient of MaskedLoss(Forward(params, batch).logits, batch).
template <typename S>
LossAndGrads<S> LossAndGradients(const ModelParams<S>& params, const Batch& batch);

// Caps within-op parallelism. 0 reads LENXFER_THREADS (default: hardware).
void SetNumThreads(int threads);
int NumThreads();

}  // namespace lenxfer

#endif  // LENXFER_MODEL_H_
