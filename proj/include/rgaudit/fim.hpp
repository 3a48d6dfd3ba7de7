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

#ifndef RGAUDIT_FIM_HPP
#define RGAUDIT_FIM_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "common.hpp"
#include "exact.hpp"
#include "mcrg.hpp"
#include "operators.hpp"
#include "rbm.hpp"

namespace rgaudit {

enum class JacobianMethod { analytic, linear_solve };

inline JacobianMethod parse_jacobian_method(const std::string &tag) {
  if (tag == "analytic") return JacobianMethod::analytic;
  if (tag == "linear-solve") return JacobianMethod::linear_solve;
  throw ContractError("unknown first-layer Jacobian method '" + tag +
                      "' (expected 'analytic' or 'linear-solve')");
}

inline std::string to_string(JacobianMethod m) {
  return m == JacobianMethod::analytic ? "analytic" : "linear-solve";
}

/// d g^(1)_b / d x_i, rows over the layer-1 basis, columns over inputs.
struct FirstLayerJacobian {
  Matrix matrix;
  JacobianMethod method = JacobianMethod::analytic;
};

/**
  Layer-1 coupling sensitivities. The layer-1 Hamiltonian is
  H = -sum_j (W x + a)_j sigma_j / 2 + const, so the analytic rows are
  -W/2 on single-spin operators and zero elsewhere. The linear-solve method
  instead solves  sum_a J_ai [<O_g><O_a> - <O_g O_a>] = Tr O_g dt_1/dx_i
  with the right side  sum_j W_ji/2 (<O_g s_j> - <O_g><s_j>), from `moments`
  (sampled or exact) or, when null, from exact layer-1 moments.
*/
inline FirstLayerJacobian first_layer_jacobian(const RbmLayer &layer1, const OperatorBasis &basis,
                                               const InputPoint &x, JacobianMethod method,
                                               const ExpectationSet *moments = nullptr,
                                               double regularization = 0.0,
                                               int limit = kDefaultEnumerationLimit) {
  require(basis.dimension == layer1.n_out(),
          "first_layer_jacobian: basis is not over the layer-1 nodes");
  require(x.dimension() == layer1.n_in(), "first_layer_jacobian: input dimension mismatch");

  // Position of each single-spin operator in the basis.
  std::vector<int> single(layer1.n_out(), -1);
  for (int a = 0; a < basis.size(); ++a)
    if (basis[a].degree() == 1) single[basis[a].indices[0]] = a;

  FirstLayerJacobian out;
  out.method = method;
  out.matrix = Matrix::Zero(basis.size(), layer1.n_in());
  if (method == JacobianMethod::analytic) {
    for (int j = 0; j < layer1.n_out(); ++j)
      out.matrix.row(single[j]) = -0.5 * layer1.weights.row(j);
    return out;
  }

  ExpectationSet exact_set;
  if (moments == nullptr) {
    check_enumerable(1, layer1.n_out(), limit);
    const Vector p = hidden_given_visible(layer1, x.coordinates);
    exact_set = exact_expectation_set(ExactDistribution(1, layer1.n_out(), product_distribution(p)),
                                      basis);
    moments = &exact_set;
  }
  require(moments->basis == basis, "first_layer_jacobian: moments use a different basis");
  const Vector &m = moments->first_moments;
  const Matrix cov = moments->second_moments - m * m.transpose();
  const Matrix a = -cov;
  Matrix cov_single(basis.size(), layer1.n_out());
  for (int j = 0; j < layer1.n_out(); ++j) cov_single.col(j) = cov.col(single[j]);
  const Matrix rhs = 0.5 * cov_single * layer1.weights;
  out.matrix = ridge_solve(a, rhs, regularization).solution;
  return out;
}

/// d g^(N) / dx = T^(N) ... T^(2) d g^(1) / dx.
inline Matrix chain_jacobian(const FirstLayerJacobian &first,
                             const std::vector<StabilityEstimate> &transitions) {
  Matrix chain = first.matrix;
  int layer = 1;
  for (const auto &t : transitions) {
    require(t.from_layer == layer && t.to_layer == layer + 1,
            "chain_jacobian: missing transition " + std::to_string(layer) + " -> " +
                std::to_string(layer + 1));
    require(t.matrix.cols() == chain.rows(),
            "chain_jacobian: basis mismatch at transition " + std::to_string(layer) + " -> " +
                std::to_string(layer + 1));
    chain = t.matrix * chain;
    ++layer;
  }
  return chain;
}

struct FimMatrix {
  Matrix matrix;  // n_in x n_in
  int basis_size = 0;
  int output_layer = 0;
  int transitions_used = 0;
  bool exact = false;
};

/// F_ij = sum_aa' dg_a/dx_i dg_a'/dx_j Cov(O_a, O_a') at the output layer.
inline FimMatrix assemble_fim(const Matrix &chain, const ExpectationSet &output_moments,
                              int transitions_used = 0) {
  require(chain.rows() == output_moments.basis.size(),
          "assemble_fim: chain has " + std::to_string(chain.rows()) + " rows, output basis has " +
              std::to_string(output_moments.basis.size()) + " operators");
  const Vector &m = output_moments.first_moments;
  const Matrix cov = output_moments.second_moments - m * m.transpose();
  FimMatrix f;
  const Matrix raw = chain.transpose() * cov * chain;
  f.matrix = 0.5 * (raw + raw.transpose());
  f.basis_size = output_moments.basis.size();
  f.output_layer = output_moments.layer_index;
  f.transitions_used = transitions_used;
  f.exact = output_moments.exact;
  return f;
}

struct FimSpectrum {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // columns aligned with eigenvalues, sign-fixed
};

namespace detail {

// Largest-magnitude component positive (lowest index on ties).
inline void fix_sign(Eigen::Ref<Vector> v) {
  Eigen::Index lead = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[lead]) + 1e-12) lead = i;
  if (v[lead] < 0) v = -v;
}

}  // namespace detail

inline FimSpectrum fim_spectrum(const FimMatrix &f) {
  require(f.matrix.rows() == f.matrix.cols(), "fim_spectrum: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (f.matrix + f.matrix.transpose()));
  const Eigen::Index n = f.matrix.rows();
  FimSpectrum s;
  s.eigenvalues.resize(n);
  s.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.eigenvalues[i] = solver.eigenvalues()[n - 1 - i];
    s.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    detail::fix_sign(s.eigenvectors.col(i));
  }
  return s;
}

struct TopMode {
  double eigenvalue = 0.0;
  Vector eigenvector;
  bool stiff = false;  // false: F vanishes, no preferred direction
};

inline constexpr double kStiffThreshold = 1e-12;

inline TopMode top_mode(const FimMatrix &f) {
  const FimSpectrum s = fim_spectrum(f);
  TopMode top;
  top.eigenvalue = s.eigenvalues[0];
  top.eigenvector = s.eigenvectors.col(0);
  top.stiff = top.eigenvalue > kStiffThreshold;
  return top;
}

/// lambda_{i+1} / lambda_i for the descending spectrum (0 when lambda_i <= 0).
inline std::vector<double> decay_ratios(const Vector &descending) {
  std::vector<double> r;
  for (Eigen::Index i = 0; i + 1 < descending.size(); ++i)
    r.push_back(descending[i] > 0.0 ? descending[i + 1] / descending[i] : 0.0);
  return r;
}

// --- attack evaluation -------------------------------------------------------------

struct PerturbationRecord {
  double epsilon = 0.0;
  Vector perturbed;
  double kl = 0.0;
  double kl_stderr = 0.0;
  int class_before = 0;
  int class_after = 0;
  bool flipped = false;
  bool clamped = false;
};

struct AttackConfig {
  std::int64_t n_chains = 100000;  // sampled mode only
  int bits_to_flip = 3;
  int kl_bootstrap = 50;
  int enumeration_limit = kDefaultEnumerationLimit;
  std::uint64_t seed = 1;
};

struct AdversarialReport {
  Vector input;
  Vector spectrum;
  std::vector<double> decay_ratios;
  Vector top_direction;
  Vector control_direction;
  bool stiff = false;
  bool exact = false;
  std::vector<PerturbationRecord> top;
  std::vector<PerturbationRecord> control;
  std::vector<int> bits_to_flip;
};

inline int readout_classes(const DeepStack &stack) {
  return stack.meta.n_classes > 0 ? stack.meta.n_classes : stack.n_out();
}

inline bool enumerable(const DeepStack &stack, int limit) {
  for (int k = 1; k <= stack.depth(); ++k)
    if (stack.width(k) > limit) return false;
  return true;
}

/// Output-unit marginals from an exact output distribution.
inline Vector exact_marginals(const Vector &q, int n) {
  Vector m = Vector::Zero(n);
  for (Eigen::Index s = 0; s < q.size(); ++s)
    for (int j = 0; j < n; ++j)
      if ((s >> j) & 1) m[j] += q[s];
  return m;
}

/// Class distribution q(c|x) proportional to the probability of class c's code.
inline Vector class_distribution(const Vector &q_out, int n_out, int n_classes) {
  Vector p(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    const Vector code = class_code(c, n_out, n_classes);
    std::uint64_t state = 0;
    for (int j = 0; j < n_out; ++j)
      if (code[j] > 0.5) state |= std::uint64_t{1} << j;
    p[c] = q_out[static_cast<Eigen::Index>(state)];
  }
  const double total = p.sum();
  return total > 0.0 ? Vector(p / total) : Vector(Vector::Constant(n_classes, 1.0 / n_classes));
}

namespace detail {

inline Vector clamp01(const Vector &x) { return x.cwiseMax(0.0).cwiseMin(1.0); }

struct SampledOutput {
  std::vector<int> chain_class;
  Vector marginals;
};

inline SampledOutput sampled_output(const DeepStack &stack, const Vector &x, int n_classes,
                                    std::int64_t n_chains, std::uint64_t seed) {
  const auto ens = propagate(stack, InputPoint(x), n_chains, seed);
  const auto &last = ens.back();
  SampledOutput out;
  out.marginals = Vector::Zero(last.dimension);
  out.chain_class.resize(last.size());
  Vector row(last.dimension);
  for (std::size_t c = 0; c < last.size(); ++c) {
    const auto s = last.sample(c);
    for (int j = 0; j < last.dimension; ++j) row[j] = s[j];
    out.marginals += row;
    out.chain_class[c] = argmax_class(class_block_means(row, n_classes));
  }
  out.marginals /= static_cast<double>(last.size());
  return out;
}

inline Vector smoothed_histogram(const std::vector<int> &classes, int n_classes,
                                 const std::vector<std::size_t> &picks) {
  Vector h = Vector::Zero(n_classes);
  for (auto i : picks) h[classes[i]] += 1.0;
  const double n = static_cast<double>(picks.size());
  const double alpha = 1.0 / (2.0 * n);
  return (h.array() + alpha).matrix() / (n + alpha * n_classes);
}

}  // namespace detail

/**
  KL divergence and class readout along x' = clamp(x + eps v). Exact when
  every layer is enumerable; otherwise plug-in class histograms with
  additive smoothing 1/(2 samples) and a chain-bootstrap standard error.
*/
inline std::vector<PerturbationRecord> evaluate_direction(const DeepStack &stack,
                                                          const InputPoint &x, const Vector &v,
                                                          const std::vector<double> &epsilons,
                                                          const AttackConfig &config) {
  require(v.size() == x.dimension(), "evaluate_direction: direction dimension mismatch");
  require(std::abs(v.norm() - 1.0) < 1e-8, "evaluate_direction: direction must be unit norm");
  for (double e : epsilons) require(e >= 0.0, "evaluate_direction: epsilons must be >= 0");
  const int n_classes = readout_classes(stack);
  const bool exact = enumerable(stack, config.enumeration_limit);
  std::vector<PerturbationRecord> records;

  if (exact) {
    const Vector base = exact_output(stack, x.coordinates, config.enumeration_limit);
    const int before =
        argmax_class(class_block_means(exact_marginals(base, stack.n_out()), n_classes));
    for (double eps : epsilons) {
      PerturbationRecord r;
      r.epsilon = eps;
      const Vector raw = x.coordinates + eps * v;
      r.perturbed = detail::clamp01(raw);
      r.clamped = (r.perturbed - raw).cwiseAbs().maxCoeff() > 0.0;
      const Vector q = exact_output(stack, r.perturbed, config.enumeration_limit);
      r.kl = exact_kl(base, q);
      r.class_before = before;
      r.class_after = argmax_class(class_block_means(exact_marginals(q, stack.n_out()), n_classes));
      r.flipped = r.class_after != r.class_before;
      records.push_back(std::move(r));
    }
    return records;
  }

  const std::uint64_t base_seed = derive_seed(config.seed, "base");
  const auto base = detail::sampled_output(stack, x.coordinates, n_classes, config.n_chains,
                                           base_seed);
  const int before = argmax_class(class_block_means(base.marginals, n_classes));
  std::vector<std::size_t> all(base.chain_class.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    PerturbationRecord r;
    r.epsilon = epsilons[e];
    const Vector raw = x.coordinates + r.epsilon * v;
    r.perturbed = detail::clamp01(raw);
    r.clamped = (r.perturbed - raw).cwiseAbs().maxCoeff() > 0.0;
    const auto moved = detail::sampled_output(stack, r.perturbed, n_classes, config.n_chains,
                                              derive_seed(config.seed, e + 1));
    auto kl_for = [&](const std::vector<std::size_t> &picks) {
      return exact_kl(detail::smoothed_histogram(base.chain_class, n_classes, picks),
                      detail::smoothed_histogram(moved.chain_class, n_classes, picks));
    };
    r.kl = kl_for(all);
    if (config.kl_bootstrap > 1) {
      Rng rng(derive_seed(config.seed, "kl-bootstrap") + e);
      std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
      std::vector<std::size_t> picks(all.size());
      double s1 = 0.0, s2 = 0.0;
      for (int b = 0; b < config.kl_bootstrap; ++b) {
        for (auto &p : picks) p = pick(rng);
        const double k = kl_for(picks);
        s1 += k;
        s2 += k * k;
      }
      const double n = config.kl_bootstrap;
      r.kl_stderr = std::sqrt(std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0)));
    }
    r.class_before = before;
    r.class_after = argmax_class(class_block_means(moved.marginals, n_classes));
    r.flipped = r.class_after != r.class_before;
    records.push_back(std::move(r));
  }
  return records;
}

/// Attack along the stiffest FIM direction, with the softest one as control.
inline AdversarialReport evaluate_attack(const DeepStack &stack, const InputPoint &x,
                                         const FimMatrix &fim, const std::vector<double> &epsilons,
                                         const AttackConfig &config) {
  require(fim.matrix.rows() == x.dimension(), "evaluate_attack: FIM dimension mismatch");
  const FimSpectrum s = fim_spectrum(fim);
  AdversarialReport report;
  report.input = x.coordinates;
  report.spectrum = s.eigenvalues;
  report.decay_ratios = decay_ratios(s.eigenvalues);
  report.top_direction = s.eigenvectors.col(0);
  report.control_direction = s.eigenvectors.col(s.eigenvectors.cols() - 1);
  report.stiff = s.eigenvalues[0] > kStiffThreshold;
  report.exact = enumerable(stack, config.enumeration_limit);
  report.top = evaluate_direction(stack, x, report.top_direction, epsilons, config);
  report.control = evaluate_direction(stack, x, report.control_direction, epsilons, config);

  std::vector<int> order(x.dimension());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(report.top_direction[a]) > std::abs(report.top_direction[b]);
  });
  order.resize(std::min<std::size_t>(order.size(), std::max(0, config.bits_to_flip)));
  report.bits_to_flip = order;
  return report;
}

}  // namespace rgaudit

#endif  // RGAUDIT_FIM_HPP
