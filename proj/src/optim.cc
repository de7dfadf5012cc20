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

#include "lenxfer/optim.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lenxfer {

template <typename S>
void AdamWUpdate(std::span<S> param, std::span<const S> grad, std::span<S> m, std::span<S> v,
                 int64_t step, double lr, const AdamWConfig& hp, bool decay) {
  if (grad.size() != param.size() || m.size() != param.size() || v.size() != param.size()) {
    throw std::invalid_argument("AdamW: shape mismatch");
  }
  const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(step));
  const double shrink = decay ? 1.0 - lr * hp.weight_decay : 1.0;
  for (size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    const double mi = hp.beta1 * m[i] + (1.0 - hp.beta1) * g;
    const double vi = hp.beta2 * v[i] + (1.0 - hp.beta2) * g * g;
    m[i] = static_cast<S>(mi);
    v[i] = static_cast<S>(vi);
    const double update = (mi / bc1) / (std::sqrt(vi / bc2) + hp.eps);
    param[i] = static_cast<S>(param[i] * shrink - lr * update);
  }
}

template <typename S>
OptimizerState<S> OptimizerState<S>::Init(const ModelConfig& config, const AdamWConfig& hp) {
  OptimizerState<S> s;
  s.hp = hp;
  s.m = ModelParams<S>::Zeros(config);
  s.v = ModelParams<S>::Zeros(config);
  return s;
}

template <typename S>
void AdamWStep(ModelParams<S>& params, const ModelParams<S>& grads, OptimizerState<S>& state, double lr) {
  auto p = params.Tensors();
  const auto g = grads.Tensors();
  auto m = state.m.Tensors();
  auto v = state.v.Tensors();
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
    throw std::invalid_argument("AdamW: parameter structure mismatch");
  }
  ++state.step;
  for (size_t i = 0; i < p.size(); ++i) {
    AdamWUpdate<S>(p[i].span(), g[i].span(), m[i].span(), v[i].span(), state.step, lr, state.hp,
                   p[i].decay);
  }
}

template <typename S>
double GradNorm(const ModelParams<S>& grads) {
  double sq = 0;
  for (const auto& t : grads.Tensors()) {
    for (S x : t.span()) sq += static_cast<double>(x) * x;
  }
  return std::sqrt(sq);
}

template <typename S>
double ClipGradNorm(ModelParams<S>& grads, double max_norm) {
  const double norm = GradNorm(grads);
  if (max_norm > 0 && norm > max_norm) {
    const auto factor = static_cast<S>(max_norm / norm);
    for (auto& t : grads.Tensors()) {
      for (S& x : t.span()) x *= factor;
    }
  }
  return norm;
}

void LrSchedule::Validate() const {
  if (!(peak_lr >= 0)) throw std::invalid_argument("peak learning rate must be >= 0");
  if (total_iters < 1 || warmup_iters < 0 || decay_iters < 0 || warmup_iters + decay_iters > total_iters) {
    throw std::invalid_argument("schedule needs warmup + decay <= total");
  }
}

double LrSchedule::At(int64_t iter) const {
  if (warmup_iters > 0 && iter < warmup_iters) {
    return peak_lr * static_cast<double>(iter) / static_cast<double>(warmup_iters);
  }
  const int64_t decay_start = total_iters - decay_iters;
  if (iter < decay_start || decay_iters == 0) return peak_lr;
  const double progress = static_cast<double>(iter - decay_start) / static_cast<double>(decay_iters);
  return peak_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * std::min(progress, 1.0)));
}

template void AdamWUpdate<float>(std::span<float>, std::span<const float>, std::span<float>,
                                 std::span<float>, int64_t, double, const AdamWConfig&, bool);
template void AdamWUpdate<double>(std::span<double>, std::span<const double>, std::span<double>,
                                  std::span<double>, int64_t, double, const AdamWConfig&, bool);
template struct OptimizerState<float>;
template struct OptimizerState<double>;
template void AdamWStep<float>(ModelParams<float>&, const ModelParams<float>&, OptimizerState<float>&, double);
template void AdamWStep<double>(ModelParams<double>&, const ModelParams<double>&, OptimizerState<double>&,
                                double);
template double GradNorm<float>(const ModelParams<float>&);
template double GradNorm<double>(const ModelParams<double>&);
template double ClipGradNorm<float>(ModelParams<float>&, double);
template double ClipGradNorm<double>(ModelParams<double>&, double);

}  // namespace lenxfer
