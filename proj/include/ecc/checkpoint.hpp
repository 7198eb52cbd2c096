/*
 * Copyright 2026 The ecc-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Versioned structured-text (JSON) model checkpoints. Parameters are stored
// row-major; doubles are written with round-trip precision. The alignment
// head is training-only and never serialized.

#include <filesystem>

#include "ecc/coinfer.hpp"

namespace ecc {

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const MlpModel<double>& model, std::uint64_t seed, const std::filesystem::path& path);
void save_checkpoint(const EdgeClassifier& model, std::uint64_t seed, const std::filesystem::path& path);

struct MlpCheckpoint {
  MlpModel<double> model;
  std::uint64_t seed = 0;
};

struct EdgeCheckpoint {
  EdgeClassifier model;
  std::uint64_t seed = 0;
};

/// Throws ParseError on malformed content or a version mismatch. Asking for
/// the wrong model kind is also a ParseError.
MlpCheckpoint load_mlp_checkpoint(const std::filesystem::path& path);
EdgeCheckpoint load_edge_checkpoint(const std::filesystem::path& path);

}  // namespace ecc
