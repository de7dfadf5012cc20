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

#include "lenxfer/model.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lenxfer/rng.h"

namespace lenxfer {
namespace {

constexpr double kNormEps = 1e-5;

template <typename S>
using RowMap = Eigen::Map<Eigen::Matrix<S, 1, Eigen::Dynamic>>;

// Row-wise RMS normalisation: out = gain * x / rms(x).
template <typename S>
void RmsNorm(const Matrix<S>& x, const Matrix<S>& gain, Matrix<S>& out, std::vector<S>& inv_rms) {
  const auto n = x.rows();
  const auto d = static_cast<double>(x.cols());
  out.resize(x.rows(), x.cols());
  inv_rms.resize(static_cast<size_t>(n));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    const S r = static_cast<S>(1.0 / std::sqrt(static_cast<double>(x.row(i).squaredNorm()) / d + kNormEps));
    inv_rms[static_cast<size_t>(i)] = r;
    out.row(i) = x.row(i).cwiseProduct(gain) * r;
  }
}

// Accumulates into dx and dgain.
template <typename S>
void RmsNormBackward(const Matrix<S>& x, const Matrix<S>& gain, const std::vector<S>& inv_rms,
                     const Matrix<S>& dout, Matrix<S>& dx, Matrix<S>& dgain) {
  const auto n = x.rows();
  const S d = static_cast<S>(x.cols());
  Matrix<S> normed(x.rows(), x.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    const S r = inv_rms[static_cast<size_t>(i)];
    normed.row(i) = x.row(i) * r;
    const Eigen::Matrix<S, 1, Eigen::Dynamic> dnormed = dout.row(i).cwiseProduct(gain);
    const S proj = dnormed.dot(normed.row(i)) / d;
    dx.row(i) += r * (dnormed - normed.row(i) * proj);
  }
  dgain += dout.cwiseProduct(normed).colwise().sum();
}

template <typename S>
S Silu(S a) {
  return a / (S(1) + std::exp(-a));
}

template <typename S>
S SiluGrad(S a) {
  const S sig = S(1) / (S(1) + std::exp(-a));
  return sig * (S(1) + a * (S(1) - sig));
}

// cos/sin of position * base^(-2i/head_dim), width x head_dim/2.
template <typename S>
struct RopeTable {
  Matrix<S> cos, sin;
};

template <typename S>
RopeTable<S> MakeRopeTable(int positions, int head_dim, double base) {
  const int half = head_dim / 2;
  RopeTable<S> t{Matrix<S>(positions, half), Matrix<S>(positions, half)};
  for (int p = 0; p < positions; ++p) {
    for (int i = 0; i < half; ++i) {
      const double theta = std::pow(base, -2.0 * i / head_dim);
      const double angle = p * theta;
      t.cos(p, i) = static_cast<S>(std::cos(angle));
      t.sin(p, i) = static_cast<S>(std::sin(angle));
    }
  }
  return t;
}

// Rotates `count` consecutive rows of a row-major block in place. Row k sits
// at position first_pos + k.
template <typename S>
void RotateRows(S* data, Eigen::Index stride, int count, int head_dim, int first_pos,
                const RopeTable<S>& table, bool inverse) {
  const int half = head_dim / 2;
  for (int k = 0; k < count; ++k) {
    S* row = data + static_cast<Eigen::Index>(k) * stride;
    const int p = first_pos + k;
    for (int i = 0; i < half; ++i) {
      const S c = table.cos(p, i);
      const S s = inverse ? -table.sin(p, i) : table.sin(p, i);
      const S x0 = row[2 * i], x1 = row[2 * i + 1];
      row[2 * i] = x0 * c - x1 * s;
      row[2 * i + 1] = x0 * s + x1 * c;
    }
  }
}

template <typename S>
struct LayerCache {
  Matrix<S> x_in, h1, q, k, v, att, x_mid, h2, gate, up, act;
  std::vector<S> r1, r2;
  std::vector<Matrix<S>> probs;  // [row * heads + head], L x L
};

template <typename S>
struct Cache {
  std::vector<LayerCache<S>> layers;
  Matrix<S> x_final, h_final;
  std::vector<S> r_final;
};

void CheckBatch(const ModelConfig& config, const Batch& batch) {
  if (batch.width > config.max_seq_len) {
    throw SequenceTooLong("sequence of " + std::to_string(batch.width) + " tokens exceeds max_seq_len " +
                          std::to_string(config.max_seq_len));
  }
  for (int t : batch.tokens) {
    if (t < 0 || t >= config.vocab_size) throw std::out_of_range("token id out of vocabulary range");
  }
}

template <typename S>
ForwardResult<S> RunForward(const ModelParams<S>& params, const Batch& batch,
                            const ForwardOptions<S>& options, Cache<S>* cache) {
  const ModelConfig& cfg = params.config;
  CheckBatch(cfg, batch);
  const int rows = batch.rows, width = batch.width;
  const int heads = cfg.heads, hd = cfg.HeadDim(), dim = cfg.embed_dim;
  const Eigen::Index n = static_cast<Eigen::Index>(rows) * width;
  const S scale = static_cast<S>(1.0 / std::sqrt(static_cast<double>(hd)));
  const bool rope = cfg.position == PositionMode::kRope;
  RopeTable<S> table;
  if (rope) table = MakeRopeTable<S>(width, hd, cfg.rope_base);

  ForwardResult<S> result;
  if (options.capture_attention) {
    result.attention.assign(static_cast<size_t>(cfg.layers * heads), Matrix<S>::Zero(n, width));
  }

  Matrix<S> x(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = params.embedding.row(batch.tokens[static_cast<size_t>(i)]);

  LayerCache<S> local;
  if (cache) cache->layers.resize(static_cast<size_t>(cfg.layers));
  for (int l = 0; l < cfg.layers; ++l) {
    const LayerParams<S>& p = params.layers[static_cast<size_t>(l)];
    LayerCache<S>& c = cache ? cache->layers[static_cast<size_t>(l)] : local;
    if (cache) c.x_in = x;
    RmsNorm(x, p.attn_norm, c.h1, c.r1);
    c.q.noalias() = c.h1 * p.wq;
    c.k.noalias() = c.h1 * p.wk;
    c.v.noalias() = c.h1 * p.wv;
    c.att = Matrix<S>::Zero(n, dim);
    c.probs.assign(static_cast<size_t>(rows * heads), Matrix<S>());

#pragma omp parallel for collapse(2) schedule(dynamic)
    for (int r = 0; r < rows; ++r) {
      for (int h = 0; h < heads; ++h) {
        const int len = batch.seq_lens[static_cast<size_t>(r)];
        const Eigen::Index base = static_cast<Eigen::Index>(r) * width;
        if (rope) {
          RotateRows(c.q.data() + base * dim + h * hd, dim, len, hd, 0, table, false);
          RotateRows(c.k.data() + base * dim + h * hd, dim, len, hd, 0, table, false);
        }
        const auto qb = c.q.block(base, h * hd, len, hd);
        const auto kb = c.k.block(base, h * hd, len, hd);
        const auto vb = c.v.block(base, h * hd, len, hd);
        Matrix<S> probs = (qb * kb.transpose()) * scale;
        for (int i = 0; i < len; ++i) {
          const S mx = probs.row(i).head(i + 1).maxCoeff();
          S sum = 0;
          for (int j = 0; j <= i; ++j) {
            probs(i, j) = std::exp(probs(i, j) - mx);
            sum += probs(i, j);
          }
          for (int j = 0; j <= i; ++j) probs(i, j) /= sum;
          for (int j = i + 1; j < len; ++j) probs(i, j) = 0;
        }
        c.att.block(base, h * hd, len, hd).noalias() = probs * vb;
        if (options.capture_attention) {
          result.attention[static_cast<size_t>(l * heads + h)].block(base, 0, len, len) = probs;
        }
        c.probs[static_cast<size_t>(r * heads + h)] = std::move(probs);
      }
    }

    if (options.patch && options.patch->layer == l) {
      const auto& patch = *options.patch;
      for (int r = 0; r < rows; ++r) {
        const int len = std::min<int>(batch.seq_lens[static_cast<size_t>(r)],
                                      static_cast<int>(patch.values.rows()));
        const Eigen::Index base = static_cast<Eigen::Index>(r) * width;
        c.att.block(base, patch.head * hd, len, hd) = patch.values.topRows(len);
      }
    }
    if (options.capture_head_outputs) result.head_outputs.push_back(c.att);

    x.noalias() += c.att * p.wo;
    if (cache) c.x_mid = x;
    RmsNorm(x, p.mlp_norm, c.h2, c.r2);
    c.gate.noalias() = c.h2 * p.w_gate;
    c.up.noalias() = c.h2 * p.w_up;
    c.act = c.gate.unaryExpr([](S a) { return Silu(a); }).cwiseProduct(c.up);
    x.noalias() += c.act * p.w_down;
  }

  Matrix<S> h_final;
  std::vector<S> r_final;
  RmsNorm(x, params.final_norm, h_final, r_final);
  result.logits.noalias() = h_final * params.unembedding;
  if (cache) {
    cache->x_final = std::move(x);
    cache->h_final = std::move(h_final);
    cache->r_final = std::move(r_final);
  }
  return result;
}

// Gradient of the mean masked cross-entropy with respect to the logits.
template <typename S>
S LossAndLogitGrad(const Matrix<S>& logits, const Batch& batch, Matrix<S>* dlogits) {
  int64_t count = 0;
  for (int r = 0; r < batch.rows; ++r) {
    for (int t = 1; t < batch.width; ++t) count += batch.Mask(r, t);
  }
  if (count == 0) throw EmptyMask("loss mask selects no positions");
  if (dlogits) *dlogits = Matrix<S>::Zero(logits.rows(), logits.cols());
  double total = 0;
  const S inv = static_cast<S>(1.0 / static_cast<double>(count));
  for (int r = 0; r < batch.rows; ++r) {
    for (int t = 1; t < batch.width; ++t) {
      if (!batch.Mask(r, t)) continue;
      const Eigen::Index row = static_cast<Eigen::Index>(r) * batch.width + t - 1;
      const int target = batch.Token(r, t);
      const S mx = logits.row(row).maxCoeff();
      const S lse = mx + std::log((logits.row(row).array() - mx).exp().sum());
      total += static_cast<double>(lse - logits(row, target));
      if (dlogits) {
        dlogits->row(row) = (logits.row(row).array() - lse).exp() * inv;
        (*dlogits)(row, target) -= inv;
      }
    }
  }
  return static_cast<S>(total / static_cast<double>(count));
}

}  // namespace

std::string_view PositionModeName(PositionMode mode) {
  return mode == PositionMode::kRope ? "rope" : "nope";
}

PositionMode PositionModeFromName(std::string_view name) {
  if (name == "rope") return PositionMode::kRope;
  if (name == "nope") return PositionMode::kNope;
  throw std::invalid_argument("position mode must be rope or nope");
}

int ModelConfig::HiddenDim() const {
  if (mlp_hidden > 0) return mlp_hidden;
  const int raw = (8 * embed_dim + 2) / 3;
  return (raw + 7) / 8 * 8;
}

void ModelConfig::Validate() const {
  if (layers < 1 || heads < 1 || embed_dim < 1 || vocab_size < 1 || max_seq_len < 1) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (embed_dim % heads != 0) throw std::invalid_argument("embed_dim must be divisible by heads");
  if (position == PositionMode::kRope && HeadDim() % 2 != 0) {
    throw OddHeadDim("rotary encoding needs an even head dimension");
  }
}

template <typename S>
ModelParams<S> ModelParams<S>::Zeros(const ModelConfig& config) {
  config.Validate();
  const int d = config.embed_dim, f = config.HiddenDim(), v = config.vocab_size;
  ModelParams<S> p;
  p.config = config;
  p.embedding = Matrix<S>::Zero(v, d);
  for (int l = 0; l < config.layers; ++l) {
    p.layers.push_back({Matrix<S>::Zero(1, d), Matrix<S>::Zero(d, d), Matrix<S>::Zero(d, d),
                        Matrix<S>::Zero(d, d), Matrix<S>::Zero(d, d), Matrix<S>::Zero(1, d),
                        Matrix<S>::Zero(d, f), Matrix<S>::Zero(d, f), Matrix<S>::Zero(f, d)});
  }
  p.final_norm = Matrix<S>::Zero(1, d);
  p.unembedding = Matrix<S>::Zero(d, v);
  return p;
}

namespace {

template <typename S, typename P>
std::vector<TensorRef<S>> CollectTensors(P& p) {
  std::vector<TensorRef<S>> out;
  auto add = [&out](std::string name, auto& m, bool decay) {
    out.push_back({std::move(name), m.data(), m.rows(), m.cols(), decay});
  };
  add("embedding", p.embedding, true);
  for (size_t l = 0; l < p.layers.size(); ++l) {
    auto& L = p.layers[l];
    const std::string pre = "layers." + std::to_string(l) + ".";
    add(pre + "attn_norm", L.attn_norm, false);
    add(pre + "wq", L.wq, true);
    add(pre + "wk", L.wk, true);
    add(pre + "wv", L.wv, true);
    add(pre + "wo", L.wo, true);
    add(pre + "mlp_norm", L.mlp_norm, false);
    add(pre + "w_gate", L.w_gate, true);
    add(pre + "w_up", L.w_up, true);
    add(pre + "w_down", L.w_down, true);
  }
  add("final_norm", p.final_norm, false);
  add("unembedding", p.unembedding, true);
  return out;
}

}  // namespace

template <typename S>
std::vector<TensorRef<S>> ModelParams<S>::Tensors() {
  return CollectTensors<S>(*this);
}

template <typename S>
std::vector<TensorRef<const S>> ModelParams<S>::Tensors() const {
  return CollectTensors<const S>(*this);
}

template <typename S>
int64_t ModelParams<S>::NumParameters() const {
  int64_t n = 0;
  for (const auto& t : Tensors()) n += static_cast<int64_t>(t.size());
  return n;
}

template <typename S>
ModelParams<S> InitParams(const ModelConfig& config, uint64_t seed) {
  ModelParams<S> p = ModelParams<S>::Zeros(config);
  Rng rng = Rng::Stream(seed, {0x1417ULL});
  const double std = 0.02;
  const double out_std = std / std::sqrt(2.0 * config.layers);
  for (auto& t : p.Tensors()) {
    if (!t.decay) {
      std::fill(t.data, t.data + t.size(), S(1));
      continue;
    }
    const bool is_out = t.name.ends_with(".wo") || t.name.ends_with(".w_down");
    const double s = is_out ? out_std : std;
    for (size_t i = 0; i < t.size(); ++i) t.data[i] = static_cast<S>(rng.Normal() * s);
  }
  return p;
}

template <typename S>
Matrix<S> RopeRotate(const Matrix<S>& vectors, std::span<const int> positions, double base, bool inverse) {
  if (vectors.cols() % 2 != 0) throw OddHeadDim("rotary encoding needs an even head dimension");
  if (static_cast<Eigen::Index>(positions.size()) != vectors.rows()) {
    throw std::invalid_argument("one position per row required");
  }
  Matrix<S> out = vectors;
  const int hd = static_cast<int>(vectors.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const int pos = positions[static_cast<size_t>(r)];
    for (int i = 0; i < hd / 2; ++i) {
      const double angle = pos * std::pow(base, -2.0 * i / hd) * (inverse ? -1.0 : 1.0);
      const S c = static_cast<S>(std::cos(angle)), s = static_cast<S>(std::sin(angle));
      const S x0 = out(r, 2 * i), x1 = out(r, 2 * i + 1);
      out(r, 2 * i) = x0 * c - x1 * s;
      out(r, 2 * i + 1) = x0 * s + x1 * c;
    }
  }
  return out;
}

template <typename S>
ForwardResult<S> Forward(const ModelParams<S>& params, const Batch& batch, const ForwardOptions<S>& options) {
  return RunForward(params, batch, options, static_cast<Cache<S>*>(nullptr));
}

template <typename S>
S MaskedLoss(const Matrix<S>& logits, const Batch& batch) {
  return LossAndLogitGrad<S>(logits, batch, nullptr);
}

template <typename S>
LossAndGrads<S> LossAndGradients(const ModelParams<S>& params, const Batch& batch) {
  const ModelConfig& cfg = params.config;
  Cache<S> cache;
  const ForwardResult<S> fwd = RunForward(params, batch, ForwardOptions<S>{}, &cache);
  LossAndGrads<S> out;
  out.grads = ModelParams<S>::Zeros(cfg);
  ModelParams<S>& g = out.grads;
  Matrix<S> dlogits;
  out.loss = LossAndLogitGrad<S>(fwd.logits, batch, &dlogits);

  const int rows = batch.rows, width = batch.width;
  const int heads = cfg.heads, hd = cfg.HeadDim(), dim = cfg.embed_dim;
  const Eigen::Index n = static_cast<Eigen::Index>(rows) * width;
  const S scale = static_cast<S>(1.0 / std::sqrt(static_cast<double>(hd)));
  const bool rope = cfg.position == PositionMode::kRope;
  RopeTable<S> table;
  if (rope) table = MakeRopeTable<S>(width, hd, cfg.rope_base);

  g.unembedding.noalias() = cache.h_final.transpose() * dlogits;
  Matrix<S> dh = dlogits * params.unembedding.transpose();
  Matrix<S> dx = Matrix<S>::Zero(n, dim);
  RmsNormBackward(cache.x_final, params.final_norm, cache.r_final, dh, dx, g.final_norm);

  for (int l = cfg.layers - 1; l >= 0; --l) {
    const LayerParams<S>& p = params.layers[static_cast<size_t>(l)];
    LayerParams<S>& gp = g.layers[static_cast<size_t>(l)];
    LayerCache<S>& c = cache.layers[static_cast<size_t>(l)];

    // MLP.
    gp.w_down.noalias() = c.act.transpose() * dx;
    Matrix<S> dact = dx * p.w_down.transpose();
    Matrix<S> dgate(n, dact.cols()), dup(n, dact.cols());
    for (Eigen::Index i = 0; i < dact.size(); ++i) {
      const S a = c.gate.data()[i];
      dgate.data()[i] = dact.data()[i] * c.up.data()[i] * SiluGrad(a);
      dup.data()[i] = dact.data()[i] * Silu(a);
    }
    gp.w_gate.noalias() = c.h2.transpose() * dgate;
    gp.w_up.noalias() = c.h2.transpose() * dup;
    dh.noalias() = dgate * p.w_gate.transpose();
    dh.noalias() += dup * p.w_up.transpose();
    RmsNormBackward(c.x_mid, p.mlp_norm, c.r2, dh, dx, gp.mlp_norm);

    // Attention.
    gp.wo.noalias() = c.att.transpose() * dx;
    const Matrix<S> datt = dx * p.wo.transpose();
    Matrix<S> dq = Matrix<S>::Zero(n, dim), dk = Matrix<S>::Zero(n, dim), dv = Matrix<S>::Zero(n, dim);
#pragma omp parallel for collapse(2) schedule(dynamic)
    for (int r = 0; r < rows; ++r) {
      for (int h = 0; h < heads; ++h) {
        const int len = batch.seq_lens[static_cast<size_t>(r)];
        const Eigen::Index base = static_cast<Eigen::Index>(r) * width;
        const Matrix<S>& probs = c.probs[static_cast<size_t>(r * heads + h)];
        const auto d_out = datt.block(base, h * hd, len, hd);
        const auto qb = c.q.block(base, h * hd, len, hd);
        const auto kb = c.k.block(base, h * hd, len, hd);
        const auto vb = c.v.block(base, h * hd, len, hd);
        dv.block(base, h * hd, len, hd).noalias() = probs.transpose() * d_out;
        Matrix<S> dprobs = d_out * vb.transpose();
        const Eigen::Matrix<S, Eigen::Dynamic, 1> row_dot = dprobs.cwiseProduct(probs).rowwise().sum();
        Matrix<S> dscores = probs.cwiseProduct(dprobs.colwise() - row_dot) * scale;
        dq.block(base, h * hd, len, hd).noalias() = dscores * kb;
        dk.block(base, h * hd, len, hd).noalias() = dscores.transpose() * qb;
        if (rope) {
          RotateRows(dq.data() + base * dim + h * hd, dim, len, hd, 0, table, true);
          RotateRows(dk.data() + base * dim + h * hd, dim, len, hd, 0, table, true);
        }
      }
    }
    gp.wq.noalias() = c.h1.transpose() * dq;
    gp.wk.noalias() = c.h1.transpose() * dk;
    gp.wv.noalias() = c.h1.transpose() * dv;
    dh.noalias() = dq * p.wq.transpose();
    dh.noalias() += dk * p.wk.transpose();
    dh.noalias() += dv * p.wv.transpose();
    RmsNormBackward(c.x_in, p.attn_norm, c.r1, dh, dx, gp.attn_norm);
  }

  for (Eigen::Index i = 0; i < n; ++i) g.embedding.row(batch.tokens[static_cast<size_t>(i)]) += dx.row(i);
  return out;
}

void SetNumThreads(int threads) {
  if (threads <= 0) {
    threads = 0;
    if (const char* env = std::getenv("LENXFER_THREADS")) threads = std::atoi(env);
  }
#ifdef _OPENMP
  if (threads <= 0) threads = omp_get_num_procs();
  omp_set_num_threads(threads);
#endif
  if (threads > 0) Eigen::setNbThreads(threads);
}

int NumThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

#define LENXFER_INSTANTIATE(S)                                                                    \
  template struct ModelParams<S>;                                                                 \
  template ModelParams<S> InitParams<S>(const ModelConfig&, uint64_t);                            \
  template Matrix<S> RopeRotate<S>(const Matrix<S>&, std::span<const int>, double, bool);         \
  template ForwardResult<S> Forward<S>(const ModelParams<S>&, const Batch&, const ForwardOptions<S>&); \
  template S MaskedLoss<S>(const Matrix<S>&, const Batch&);                                       \
  template LossAndGrads<S> LossAndGradients<S>(const ModelParams<S>&, const Batch&);

LENXFER_INSTANTIATE(float)
LENXFER_INSTANTIATE(double)

#undef LENXFER_INSTANTIATE

}  // namespace lenxfer
