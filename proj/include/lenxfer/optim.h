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

#ifndef LENXFER_OPTIM_H_
#define LENXFER_OPTIM_H_

#include <cstdint>
#include <span>

#include "lenxfer/model.h"

namespace lenxfer {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps = 1e-8;
  double weight_decay = 0.1;
};

// Decoupled weight decay (param *= 1 - lr * wd) followed by the
// bias-corrected Adam update. `step` is the 1-based step number.
template <typename S>
void AdamWUpdate(std::span<S> param, std::span<const S> grad, std::span<S> m, std::span<S> v,
                 int64_t step, double lr, const AdamWConfig& hp, bool decay);

template <typename S>
struct OptimizerState {
  AdamWConfig hp;
  int64_t step = 0;
  ModelParams<S> m;
  ModelParams<S> v;

  static OptimizerState Init(const ModelConfig& config, const AdamWConfig& hp = {});
};

// Weight decay is skipped for norm gains.
template <typename S>
void AdamWStep(ModelParams<S>& params, const ModelParams<S>& grads, OptimizerState<S>& state, double lr);

// Global L2 norm over every gradient tensor.
template <typename S>
double GradNorm(const ModelParams<S>& grads);

// Rescales so the global norm is at most max_norm. Returns the norm before
// clipping.
template <typename S>
double ClipGradNorm(ModelParams<S>& grads, double max_norm);

// Linear warmup from 0, constant at the peak, cosine decay to 0 over the
// last `decay_iters` iterations.
struct LrSchedule {
  double peak_lr = 1e-3;
  int64_t warmup_iters = 2000;
  int64_t total_iters = 20000;
  int64_t decay_iters = 5000;

  double At(int64_t iter) const;
  void Validate() const;
};

}  // namespace lenxfer

#endif  // LENXFER_OPTIM_H_
