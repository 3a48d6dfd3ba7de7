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

#ifndef RGAUDIT_OPERATORS_HPP
#define RGAUDIT_OPERATORS_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"

namespace rgaudit {

/**
  Spin-product operator O(h) = prod_{i in indices} (2 h_i - 1). The identity
  (empty product) is excluded: its coupling is the unobservable -log Z.
*/
struct OperatorId {
  std::vector<int> indices;  // strictly increasing

  OperatorId() = default;
  explicit OperatorId(std::vector<int> idx) : indices(std::move(idx)) {
    require(!indices.empty(), "OperatorId: the identity operator is not part of a basis");
    std::sort(indices.begin(), indices.end());
    require(std::adjacent_find(indices.begin(), indices.end()) == indices.end(),
            "OperatorId: repeated node index");
    require(indices.front() >= 0, "OperatorId: negative node index");
  }

  int degree() const { return static_cast<int>(indices.size()); }

  /// Bit mask form; only meaningful for layers of at most 63 nodes.
  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (int i : indices) m |= std::uint64_t{1} << i;
    return m;
  }

  static OperatorId from_mask(std::uint64_t mask) {
    std::vector<int> idx;
    for (int i = 0; mask != 0; ++i, mask >>= 1)
      if (mask & 1U) idx.push_back(i);
    return OperatorId(std::move(idx));
  }

  /// Canonical order: by degree, then lexicographic indices.
  friend bool operator<(const OperatorId &a, const OperatorId &b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.indices < b.indices;
  }
  friend bool operator==(const OperatorId &a, const OperatorId &b) {
    return a.indices == b.indices;
  }
};

inline double evaluate(const OperatorId &op, std::span<const std::uint8_t> h) {
  int negatives = 0;
  for (int i : op.indices) {
    require(i < static_cast<int>(h.size()), "evaluate: operator index " + std::to_string(i) +
                                                " out of range for a " +
                                                std::to_string(h.size()) + "-node layer");
    negatives += h[i] == 0;
  }
  return (negatives & 1) ? -1.0 : 1.0;
}

/// O(h) for h given as a state index (bit i = node i).
inline double evaluate_mask(std::uint64_t mask, std::uint64_t state) {
  return (popcount(mask & ~state) & 1) ? -1.0 : 1.0;
}

struct OperatorBasis {
  int dimension = 0;
  int max_degree = 0;
  std::vector<OperatorId> operators;

  int size() const { return static_cast<int>(operators.size()); }
  bool is_full() const { return max_degree == dimension; }
  const OperatorId &operator[](int i) const { return operators[i]; }

  std::vector<std::uint64_t> masks() const {
    require(dimension <= 63, "OperatorBasis: mask form needs at most 63 nodes");
    std::vector<std::uint64_t> m(operators.size());
    for (std::size_t a = 0; a < operators.size(); ++a) m[a] = operators[a].mask();
    return m;
  }

  friend bool operator==(const OperatorBasis &a, const OperatorBasis &b) {
    return a.dimension == b.dimension && a.operators == b.operators;
  }

  void validate() const {
    require(dimension >= 1, "OperatorBasis: dimension must be >= 1");
    for (std::size_t a = 0; a < operators.size(); ++a) {
      require(operators[a].indices.back() < dimension,
              "OperatorBasis: operator index out of range");
      if (a > 0)
        require(operators[a - 1] < operators[a], "OperatorBasis: operators not canonical");
    }
  }
};

/// Values of every basis operator on configuration h.
inline void evaluate_all(const OperatorBasis &basis, std::span<const std::uint8_t> h,
                         Eigen::Ref<Vector> out) {
  for (int a = 0; a < basis.size(); ++a) out[a] = evaluate(basis.operators[a], h);
}

/// All non-empty masks of size <= max_degree, canonically ordered.
inline OperatorBasis enumerate_basis(int dimension, int max_degree) {
  require(dimension >= 1, "enumerate_basis: dimension must be >= 1");
  require(max_degree >= 1 && max_degree <= dimension,
          "enumerate_basis: max_degree " + std::to_string(max_degree) +
              " must lie in [1, " + std::to_string(dimension) + "]");
  OperatorBasis basis;
  basis.dimension = dimension;
  basis.max_degree = max_degree;
  for (int d = 1; d <= max_degree; ++d) {
    // Lexicographic d-subsets of {0..dimension-1}.
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    while (true) {
      basis.operators.emplace_back(idx);
      int i = d - 1;
      while (i >= 0 && idx[i] == dimension - d + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return basis;
}

/// Unnormalized in-place Walsh-Hadamard transform: out[m] = sum_s in[s] (-1)^{|m & s|}.
inline void walsh_hadamard(std::span<double> data) {
  const std::size_t n = data.size();
  require(n != 0 && (n & (n - 1)) == 0, "walsh_hadamard: length must be a power of two");
  for (std::size_t len = 1; len < n; len <<= 1)
    for (std::size_t i = 0; i < n; i += len << 1)
      for (std::size_t j = i; j < i + len; ++j) {
        const double u = data[j];
        const double v = data[j + len];
        data[j] = u + v;
        data[j + len] = u - v;
      }
}

/// Expectation of every spin product under dist: E[O_m] for all masks m
/// (entry 0 is the identity, equal to the total mass).
inline Vector all_mask_expectations(const Vector &dist) {
  Vector f = dist;
  walsh_hadamard(std::span<double>(f.data(), f.size()));
  for (Eigen::Index m = 0; m < f.size(); ++m)
    if (popcount(static_cast<std::uint64_t>(m)) & 1) f[m] = -f[m];
  return f;
}

struct CouplingVector {
  OperatorBasis basis;
  Vector values;

  CouplingVector() = default;
  CouplingVector(OperatorBasis b, Vector v) : basis(std::move(b)), values(std::move(v)) {
    require(values.size() == basis.size(), "CouplingVector: length " +
                                               std::to_string(values.size()) +
                                               " does not match basis size " +
                                               std::to_string(basis.size()));
    require(values.allFinite(), "CouplingVector: non-finite coupling");
  }
};

inline int state_count(int dimension) {
  require(dimension >= 0 && dimension <= 30, "state_count: dimension too large to enumerate");
  return 1 << dimension;
}

/**
  Exact couplings of H = -log dist (up to a constant) by projection on the
  orthogonal spin products: g_m = -2^{-n} sum_h log dist(h) O_m(h).
  Entries below `floor` are raised to it before the logarithm; floor = 0
  turns a zero probability into an error.
*/
inline CouplingVector couplings_from_distribution(const Vector &dist, const OperatorBasis &basis,
                                                  double floor = kProbabilityFloor) {
  require(dist.size() == state_count(basis.dimension),
          "couplings_from_distribution: distribution has " + std::to_string(dist.size()) +
              " entries, basis dimension " + std::to_string(basis.dimension) + " needs " +
              std::to_string(state_count(basis.dimension)));
  require(std::abs(dist.sum() - 1.0) <= std::max(1e-12, 4e-16 * static_cast<double>(dist.size())),
          "couplings_from_distribution: distribution does not sum to 1");
  Vector log_p(dist.size());
  for (Eigen::Index s = 0; s < dist.size(); ++s) {
    require(dist[s] >= 0.0, "couplings_from_distribution: negative probability");
    if (dist[s] <= 0.0 && floor <= 0.0)
      throw ContractError("couplings_from_distribution: zero probability at state " +
                          std::to_string(s) + " and no floor");
    log_p[s] = std::log(std::max(dist[s], floor));
  }
  const Vector e = all_mask_expectations(log_p);  // sum_h log p(h) O_m(h)
  const double scale = -1.0 / static_cast<double>(dist.size());
  Vector g(basis.size());
  const auto masks = basis.masks();
  for (int a = 0; a < basis.size(); ++a) g[a] = scale * e[static_cast<Eigen::Index>(masks[a])];
  return CouplingVector(basis, std::move(g));
}

/// H(h) = sum_a g_a O_a(h) on every state.
inline Vector hamiltonian_values(const CouplingVector &g) {
  const int n_states = state_count(g.basis.dimension);
  Vector coeff = Vector::Zero(n_states);
  const auto masks = g.basis.masks();
  for (int a = 0; a < g.basis.size(); ++a) {
    const auto m = masks[a];
    coeff[static_cast<Eigen::Index>(m)] = (popcount(m) & 1) ? -g.values[a] : g.values[a];
  }
  walsh_hadamard(std::span<double>(coeff.data(), coeff.size()));
  return coeff;
}

/// exp(-H) / Z over all 2^n states.
inline Vector distribution_from_couplings(const CouplingVector &g) {
  Vector h = hamiltonian_values(g);
  const double lowest = h.minCoeff();
  Vector p = (-(h.array() - lowest)).exp().matrix();
  return p / p.sum();
}

}  // namespace rgaudit

#endif  // RGAUDIT_OPERATORS_HPP
