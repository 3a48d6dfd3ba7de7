// Copyright 2026 The rgaudit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RGAUDIT_COMMON_HPP
#define RGAUDIT_COMMON_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rgaudit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Binary configuration of a layer, one byte per unit (0 or 1).
using BitVector = std::vector<std::uint8_t>;

/// Dimension mismatch, out-of-range index or other broken precondition.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A layer is too wide for dense enumeration of its 2^n states.
class EnumerationLimitError : public std::runtime_error {
 public:
  EnumerationLimitError(int layer, int nodes, int limit)
      : std::runtime_error("layer " + std::to_string(layer) + " has " +
                           std::to_string(nodes) +
                           " nodes, above the enumeration limit of " +
                           std::to_string(limit)),
        layer_(layer),
        nodes_(nodes),
        limit_(limit) {}

  int layer() const { return layer_; }
  int nodes() const { return nodes_; }
  int limit() const { return limit_; }

 private:
  int layer_;
  int nodes_;
  int limit_;
};

/// Linear system too ill-conditioned to solve without regularization.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr int kDefaultEnumerationLimit = 14;

inline void require(bool condition, const std::string &message) {
  if (!condition) throw ContractError(message);
}

inline double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double spin(std::uint8_t bit) { return bit ? 1.0 : -1.0; }

inline bool all_finite(const Matrix &m) { return m.allFinite(); }
inline bool all_finite(const Vector &v) { return v.allFinite(); }

// Seed derivation. All randomness flows from one root seed through named
// sub-streams; chains get their own stream derived from the stage seed.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(mix64(parent) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(parent, h);
}

using Rng = std::mt19937_64;

/// SplitMix64 stream, cheap enough to seed once per Monte Carlo chain.
class ChainRng {
 public:
  using result_type = std::uint64_t;
  explicit ChainRng(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    const std::uint64_t z = state_;
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(z);
  }

 private:
  std::uint64_t state_;
};

/// Uniform double in [0, 1) from the top 53 bits; stable across platforms.
template <class Gen>
inline double uniform01(Gen &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int popcount(std::uint64_t x) { return __builtin_popcountll(x); }

inline std::uint64_t bits_to_index(const BitVector &bits) {
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) index |= (std::uint64_t{1} << i);
  return index;
}

inline BitVector index_to_bits(std::uint64_t index, int n) {
  BitVector bits(n);
  for (int i = 0; i < n; ++i) bits[i] = (index >> i) & 1U;
  return bits;
}

}  // namespace rgaudit

#endif  // RGAUDIT_COMMON_HPP
