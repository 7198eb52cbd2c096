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

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace ecc {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVecX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using MatXd = MatX<double>;
using VecXd = VecX<double>;

using Rng = std::mt19937_64;

// Error taxonomy shared by every module. The CLI maps ConfigError to exit
// status 2 and everything else to 1.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericError : std::domain_error {
  using std::domain_error::domain_error;
};

struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UndefinedMetricError : std::domain_error {
  using std::domain_error::domain_error;
};

enum class Route : std::uint8_t { Edge, Cloud };

inline const char* to_string(Route r) { return r == Route::Edge ? "edge" : "cloud"; }

/// Index of the largest entry; the first one wins on ties.
template <typename Derived>
Eigen::Index argmax(const Eigen::DenseBase<Derived>& v) {
  Eigen::Index best = 0;
  v.maxCoeff(&best);
  return best;
}

/// Derives an independent stream seed from a base seed and a tag (splitmix64).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace ecc
