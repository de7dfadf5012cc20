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

#ifndef LENXFER_RNG_H_
#define LENXFER_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace lenxfer {

// Seeded random source with platform-stable output.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The distributions shipped with the standard library are not, so
// the integer, uniform and normal draws below are implemented directly on top
// of raw engine output. This keeps generated datasets and initial weights
// byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  // Independent stream keyed by (seed, ids...). Seeds the engine through
  // std::seed_seq, which is itself fully specified.
  static Rng Stream(uint64_t seed, std::initializer_list<uint64_t> ids);

  uint64_t NextU64() { return engine_(); }

  // Uniform integer in [lo, hi], inclusive. Unbiased (rejection sampling).
  int64_t UniformInt(int64_t lo, int64_t hi);

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform01();

  // Standard normal via Box-Muller.
  double Normal();

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<size_t>(UniformInt(0, static_cast<int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  void Reseed(uint64_t seed, std::initializer_list<uint64_t> ids);

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// 64-bit mixing function (splitmix64 finalizer). Used to derive seeds.
uint64_t Mix64(uint64_t x);

}  // namespace lenxfer

#endif  // LENXFER_RNG_H_
