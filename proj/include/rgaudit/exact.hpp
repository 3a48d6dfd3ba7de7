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

#ifndef RGAUDIT_EXACT_HPP
#define RGAUDIT_EXACT_HPP

#include <cstdint>
#include <vector>

#include "common.hpp"
#include "operators.hpp"
#include "rbm.hpp"

// Brute-force enumeration over all 2^n configurations of small layers. Every
// sampled estimate in the library is checked against these routines.

namespace rgaudit {

struct ExactDistribution {
  int layer_index = 0;
  int dimension = 0;
  Vector probabilities;  // indexed by state, bit i = node i

  ExactDistribution() = default;
  ExactDistribution(int layer, int n, Vector p)
      : layer_index(layer), dimension(n), probabilities(std::move(p)) {
    require(probabilities.size() == state_count(dimension),
            "ExactDistribution: wrong number of states");
  }
};

inline void check_enumerable(int layer, int nodes, int limit) {
  if (nodes > limit) throw EnumerationLimitError(layer, nodes, limit);
}

/// Product distribution over 2^n states with p(h_j = 1) = p[j].
inline Vector product_distribution(const Vector &p) {
  const int n = static_cast<int>(p.size());
  Vector out(state_count(n));
  out[0] = 1.0;
  Eigen::Index filled = 1;
  for (int j = 0; j < n; ++j) {
    for (Eigen::Index s = 0; s < filled; ++s) {
      out[s + filled] = out[s] * p[j];
      out[s] *= 1.0 - p[j];
    }
    filled <<= 1;
  }
  return out;
}

/// Dense t(h|v): row v (visible state), column h (hidden state).
inline Matrix transition_matrix(const RbmLayer &layer,
                                int limit = kDefaultEnumerationLimit) {
  check_enumerable(0, layer.n_in(), limit);
  check_enumerable(1, layer.n_out(), limit);
  const int rows = state_count(layer.n_in());
  Matrix t(rows, state_count(layer.n_out()));
  for (int v = 0; v < rows; ++v) {
    const BitVector bits = index_to_bits(v, layer.n_in());
    t.row(v) = product_distribution(hidden_given_visible(layer, std::span<const std::uint8_t>(bits)))
                   .transpose();
  }
  return t;
}

/// q'(h) = sum_v t(h|v) q(v).
inline Vector push_forward(const Vector &q, const RbmLayer &layer) {
  require(q.size() == state_count(layer.n_in()), "push_forward: distribution dimension mismatch");
  Vector out = Vector::Zero(state_count(layer.n_out()));
  for (Eigen::Index v = 0; v < q.size(); ++v) {
    if (q[v] == 0.0) continue;
    const BitVector bits = index_to_bits(static_cast<std::uint64_t>(v), layer.n_in());
    out += q[v] * product_distribution(
                      hidden_given_visible(layer, std::span<const std::uint8_t>(bits)));
  }
  return out;
}

/// Exact q_k(.|x): layer 1 applied to the real input, then push-forwards.
inline ExactDistribution exact_layer_distribution(const DeepStack &stack, const InputPoint &x,
                                                  int k, int limit = kDefaultEnumerationLimit) {
  stack.validate();
  require(k >= 1 && k <= stack.depth(), "exact_layer_distribution: layer index " +
                                            std::to_string(k) + " out of range");
  require(x.dimension() == stack.n_in(), "exact_layer_distribution: input dimension mismatch");
  for (int j = 1; j <= k; ++j) check_enumerable(j, stack.width(j), limit);

  Vector q = product_distribution(hidden_given_visible(stack.layers[0], x.coordinates));
  for (int j = 2; j <= k; ++j) q = push_forward(q, stack.layers[j - 1]);
  return ExactDistribution(k, stack.width(k), std::move(q));
}

inline Vector exact_expectations(const ExactDistribution &dist, const OperatorBasis &basis) {
  require(dist.dimension == basis.dimension, "exact_expectations: basis dimension mismatch");
  const Vector all = all_mask_expectations(dist.probabilities);
  const auto masks = basis.masks();
  Vector out(basis.size());
  for (int a = 0; a < basis.size(); ++a) out[a] = all[static_cast<Eigen::Index>(masks[a])];
  return out;
}

/// <O_a O_b>; O_a O_b is the spin product over the symmetric difference.
inline Matrix exact_second_moments(const ExactDistribution &dist, const OperatorBasis &basis) {
  require(dist.dimension == basis.dimension, "exact_second_moments: basis dimension mismatch");
  const Vector all = all_mask_expectations(dist.probabilities);
  const auto masks = basis.masks();
  Matrix out(basis.size(), basis.size());
  for (int a = 0; a < basis.size(); ++a)
    for (int b = 0; b < basis.size(); ++b)
      out(a, b) = all[static_cast<Eigen::Index>(masks[a] ^ masks[b])];
  return out;
}

/**
  Between-layer moments <O_g t O_b> = sum_v q(v) O_b(v) sum_h t(h|v) O_g(h).
  The inner sum factorizes: prod_{i in g} (2 p_i(v) - 1).
  Rows index the next-layer basis, columns the previous-layer basis.
*/
inline Matrix exact_cross_moments(const Vector &q_prev, const RbmLayer &kernel,
                                  const OperatorBasis &prev_basis,
                                  const OperatorBasis &next_basis) {
  require(prev_basis.dimension == kernel.n_in() && next_basis.dimension == kernel.n_out(),
          "exact_cross_moments: basis dimensions do not match the kernel");
  require(q_prev.size() == state_count(kernel.n_in()),
          "exact_cross_moments: distribution dimension mismatch");
  const auto prev_masks = prev_basis.masks();
  Matrix out = Matrix::Zero(next_basis.size(), prev_basis.size());
  Vector inner(next_basis.size());
  Vector outer(prev_basis.size());
  for (Eigen::Index v = 0; v < q_prev.size(); ++v) {
    if (q_prev[v] == 0.0) continue;
    const BitVector bits = index_to_bits(static_cast<std::uint64_t>(v), kernel.n_in());
    const Vector m = (2.0 * hidden_given_visible(kernel, std::span<const std::uint8_t>(bits)))
                         .array() - 1.0;
    for (int g = 0; g < next_basis.size(); ++g) {
      double prod = 1.0;
      for (int i : next_basis[g].indices) prod *= m[i];
      inner[g] = prod;
    }
    for (int b = 0; b < prev_basis.size(); ++b)
      outer[b] = evaluate_mask(prev_masks[b], static_cast<std::uint64_t>(v));
    out.noalias() += q_prev[v] * inner * outer.transpose();
  }
  return out;
}

/// One exact RG step: couplings -> distribution -> kernel -> couplings.
inline CouplingVector exact_rg_step(const CouplingVector &couplings, const RbmLayer &kernel,
                                    int limit = kDefaultEnumerationLimit) {
  require(couplings.basis.is_full(),
          "exact_rg_step: a truncated basis cannot represent the pushed-forward distribution");
  require(couplings.basis.dimension == kernel.n_in(),
          "exact_rg_step: coupling dimension does not match kernel input");
  check_enumerable(0, kernel.n_in(), limit);
  check_enumerable(1, kernel.n_out(), limit);
  const Vector q = distribution_from_couplings(couplings);
  return couplings_from_distribution(push_forward(q, kernel),
                                     enumerate_basis(kernel.n_out(), kernel.n_out()));
}

/// Central-difference Jacobian T_ab = d g'_a / d g_b of exact_rg_step.
inline Matrix jacobian_fd(const RbmLayer &kernel, const CouplingVector &at, double step = 1e-4,
                          int limit = kDefaultEnumerationLimit) {
  require(step > 0.0, "jacobian_fd: step must be positive");
  require(at.basis.is_full(), "jacobian_fd: full basis required");
  check_enumerable(0, kernel.n_in(), limit);
  check_enumerable(1, kernel.n_out(), limit);
  const int out_size = state_count(kernel.n_out()) - 1;
  Matrix t(out_size, at.basis.size());
  for (int b = 0; b < at.basis.size(); ++b) {
    CouplingVector plus = at;
    CouplingVector minus = at;
    plus.values[b] += step;
    minus.values[b] -= step;
    t.col(b) = (exact_rg_step(plus, kernel, limit).values -
                exact_rg_step(minus, kernel, limit).values) /
               (2.0 * step);
  }
  return t;
}

/// D_KL(p1 || p2) in nats; zeros of p2 are raised to the floor.
inline double exact_kl(const Vector &p1, const Vector &p2, double floor = kProbabilityFloor) {
  require(p1.size() == p2.size(), "exact_kl: dimension mismatch");
  double kl = 0.0;
  for (Eigen::Index s = 0; s < p1.size(); ++s) {
    if (p1[s] <= 0.0) continue;
    kl += p1[s] * (std::log(p1[s]) - std::log(std::max(p2[s], floor)));
  }
  return std::max(kl, 0.0);
}

inline double exact_kl(const ExactDistribution &p1, const ExactDistribution &p2,
                       double floor = kProbabilityFloor) {
  require(p1.dimension == p2.dimension, "exact_kl: dimension mismatch");
  return exact_kl(p1.probabilities, p2.probabilities, floor);
}

/// Exact output distribution q_N(.|x).
inline Vector exact_output(const DeepStack &stack, const Vector &x,
                           int limit = kDefaultEnumerationLimit) {
  Vector q = product_distribution(hidden_given_visible(stack.layers[0], x));
  for (int j = 2; j <= stack.depth(); ++j) {
    check_enumerable(j - 1, stack.width(j - 1), limit);
    q = push_forward(q, stack.layers[j - 1]);
  }
  return q;
}

struct FimFdResult {
  Matrix fim;
  double step = 0.0;
  std::vector<int> one_sided;  // coordinates whose stencil left [0,1]
};

/**
  Hessian of x' -> D_KL(q_N(.|x) || q_N(.|x')) at x' = x by second-order
  finite differences on exact output distributions. Coordinates where
  x +- step leaves [0,1] use a forward/backward stencil kept inside the box
  and are listed in `one_sided`.
*/
inline FimFdResult fim_fd(const DeepStack &stack, const InputPoint &x, double step = 1e-3,
                          int limit = kDefaultEnumerationLimit) {
  stack.validate();
  require(step > 0.0, "fim_fd: step must be positive");
  require(x.dimension() == stack.n_in(), "fim_fd: input dimension mismatch");
  for (int j = 1; j <= stack.depth(); ++j) check_enumerable(j, stack.width(j), limit);

  const int n = stack.n_in();
  const Vector base = exact_output(stack, x.coordinates, limit);
  auto kl_at = [&](const Vector &xp) { return exact_kl(base, exact_output(stack, xp, limit)); };

  FimFdResult result;
  result.step = step;
  result.fim = Matrix::Zero(n, n);
  std::vector<double> direction(n, 0.0);  // 0: central, +-1: one-sided
  for (int i = 0; i < n; ++i) {
    const double xi = x.coordinates[i];
    if (xi - step < 0.0 || xi + step > 1.0) {
      direction[i] = (xi + 2.0 * step <= 1.0) ? 1.0 : -1.0;
      result.one_sided.push_back(i);
    }
  }
  auto shifted = [&](int i, double di, int j, double dj) {
    Vector xp = x.coordinates;
    xp[i] += di;
    if (j >= 0) xp[j] += dj;
    return kl_at(xp);
  };

  for (int i = 0; i < n; ++i) {
    if (direction[i] == 0.0) {
      result.fim(i, i) = (shifted(i, step, -1, 0) + shifted(i, -step, -1, 0)) / (step * step);
    } else {
      const double s = direction[i] * step;
      result.fim(i, i) = (shifted(i, 2 * s, -1, 0) - 2.0 * shifted(i, s, -1, 0)) / (step * step);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double value;
      if (direction[i] == 0.0 && direction[j] == 0.0) {
        value = (shifted(i, step, j, step) - shifted(i, step, j, -step) -
                 shifted(i, -step, j, step) + shifted(i, -step, j, -step)) /
                (4.0 * step * step);
      } else {
        const double si = (direction[i] == 0.0 ? 1.0 : direction[i]) * step;
        const double sj = (direction[j] == 0.0 ? 1.0 : direction[j]) * step;
        value = (shifted(i, si, j, sj) - shifted(i, si, -1, 0) - shifted(j, sj, -1, 0)) /
                (si * sj);
      }
      result.fim(i, j) = value;
      result.fim(j, i) = value;
    }
  return result;
}

}  // namespace rgaudit

#endif  // RGAUDIT_EXACT_HPP
