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

#ifndef LENXFER_CHECKPOINT_H_
#define LENXFER_CHECKPOINT_H_

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "lenxfer/model.h"
#include "lenxfer/optim.h"

namespace lenxfer {

class CorruptCheckpoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VersionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr uint32_t kCheckpointVersion = 1;

// Everything a run needs to continue exactly where it stopped.
struct Checkpoint {
  int64_t iteration = 0;
  uint64_t data_seed = 0;
  uint64_t model_seed = 0;
  // Training loss accumulated since the last metrics row.
  double loss_sum = 0;
  int64_t loss_count = 0;
  // Canonical run configuration text; may be empty.
  std::string run_config;
  ModelParams<float> params;
  OptimizerState<float> optimizer;
};

// Little-endian binary layout ending in an FNV-1a 64 checksum of every
// preceding byte. Floats are stored bit-for-bit.
void WriteCheckpoint(std::ostream& out, const Checkpoint& ckpt);
// Throws CorruptCheckpoint (truncation, bad magic, checksum, shapes) or
// VersionMismatch.
Checkpoint ReadCheckpoint(std::istream& in);

// Writes to a sibling temporary file, then renames over `path`.
void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint LoadCheckpoint(const std::string& path);

// "ckpt_00001234.bin"
std::string CheckpointFileName(int64_t iteration);

}  // namespace lenxfer

#endif  // LENXFER_CHECKPOINT_H_
