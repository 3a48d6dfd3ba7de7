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

#ifndef RGAUDIT_MCRG_HPP
#define RGAUDIT_MCRG_HPP

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "common.hpp"
#include "exact.hpp"
#include "operators.hpp"
#include "rbm.hpp"

namespace rgaudit {

/**
  Operator moments of one layer k:
    first_moments   <O_g>^(k)
    second_moments  <O_g O_a>^(k)
    cross_moments   <O_g t_k O_b>^(k-1), g on layer k, b on layer k-1
  previous_first_moments holds <O_b>^(k-1) over the same paired samples.
  Sampled sets keep per-batch partial sums (batches are contiguous chain
  ranges, identical across layers of one propagation) for the bootstrap.
*/
struct ExpectationSet {
  int layer_index = 0;
  OperatorBasis basis;
  std::optional<OperatorBasis> previous_basis;
  Vector first_moments;
  Matrix second_moments;
  Matrix cross_moments;
  Vector previous_first_moments;
  std::int64_t sample_count = 0;  // 0 for exact moments
  bool exact = false;

  std::vector<std::int64_t> batch_counts;
  Matrix batch_first;            // batches x |basis|
  Matrix batch_previous_first;   // batches x |previous basis|
  std::vector<Matrix> batch_second;
  std::vector<Matrix> batch_cross;

  bool has_cross() const { return previous_basis.has_value(); }
  int batches() const { return static_cast<int>(batch_counts.size()); }

  /// Moments recomputed from a multiset of batches (bootstrap resample).
  ExpectationSet resampled(const std::vector<int> &picks) const {
    ExpectationSet out = *this;
    out.batch_counts.clear();
    out.batch_first.resize(0, 0);
    out.batch_previous_first.resize(0, 0);
    out.batch_second.clear();
    out.batch_cross.clear();
    std::int64_t total = 0;
    const Eigen::Index size = batch_first.cols();
    out.first_moments = Vector::Zero(size);
    out.second_moments = Matrix::Zero(size, size);
    if (has_cross()) {
      out.cross_moments = Matrix::Zero(size, batch_previous_first.cols());
      out.previous_first_moments = Vector::Zero(batch_previous_first.cols());
    }
    for (int b : picks) {
      total += batch_counts[b];
      out.first_moments += batch_first.row(b).transpose();
      out.second_moments += batch_second[b];
      if (has_cross()) {
        out.cross_moments += batch_cross[b];
        out.previous_first_moments += batch_previous_first.row(b).transpose();
      }
    }
    const double inv = 1.0 / static_cast<double>(total);
    out.first_moments *= inv;
    out.second_moments *= inv;
    if (has_cross()) {
      out.cross_moments *= inv;
      out.previous_first_moments *= inv;
    }
    out.sample_count = total;
    return out;
  }
};

inline constexpr std::int64_t kMinimumSamples = 100;
// Joint (current, previous) widths up to this many bits use state histograms.
inline constexpr int kHistogramBits = 16;

/**
  Monte Carlo moments from an ensemble. With `previous_basis`, the cross
  block averages O_g(h_k) O_b(h_{k-1}) over the paired samples.
*/
inline ExpectationSet estimate_expectations(const LayerEnsemble &ensemble,
                                            const OperatorBasis &basis,
                                            const OperatorBasis *previous_basis = nullptr,
                                            int n_batches = 256) {
  require(basis.dimension == ensemble.dimension,
          "estimate_expectations: basis dimension does not match layer " +
              std::to_string(ensemble.layer_index));
  const auto n = static_cast<std::int64_t>(ensemble.size());
  require(n >= kMinimumSamples, "estimate_expectations: " + std::to_string(n) +
                                    " samples, at least " + std::to_string(kMinimumSamples) +
                                    " required");
  require(n_batches >= 1, "estimate_expectations: n_batches must be >= 1");
  if (previous_basis) {
    require(!ensemble.pairs_with_input() &&
                ensemble.paired_previous.size() ==
                    static_cast<std::size_t>(n) * ensemble.previous_dimension,
            "estimate_expectations: ensemble of layer " + std::to_string(ensemble.layer_index) +
                " carries no paired binary parents");
    require(previous_basis->dimension == ensemble.previous_dimension,
            "estimate_expectations: previous basis dimension mismatch");
  }

  const int size = basis.size();
  const int psize = previous_basis ? previous_basis->size() : 0;
  const int batches = static_cast<int>(std::min<std::int64_t>(n_batches, n));

  ExpectationSet set;
  set.layer_index = ensemble.layer_index;
  set.basis = basis;
  if (previous_basis) set.previous_basis = *previous_basis;
  set.sample_count = n;
  set.batch_counts.assign(batches, 0);
  set.batch_first = Matrix::Zero(batches, size);
  set.batch_second.assign(batches, Matrix::Zero(size, size));
  if (previous_basis) {
    set.batch_previous_first = Matrix::Zero(batches, psize);
    set.batch_cross.assign(batches, Matrix::Zero(size, psize));
  }

  auto state_of = [](std::span<const std::uint8_t> bits) {
    std::uint64_t state = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i]) state |= std::uint64_t{1} << i;
    return state;
  };
  const int joint_bits = ensemble.dimension + (previous_basis ? ensemble.previous_dimension : 0);
  if (joint_bits <= kHistogramBits) {
    // Per-batch histograms over (previous, current) states, then moments
    // from the operator values of each visited state.
    const auto masks = basis.masks();
    const auto pmasks = previous_basis ? previous_basis->masks() : std::vector<std::uint64_t>{};
    const std::uint64_t low = (std::uint64_t{1} << ensemble.dimension) - 1;
    std::vector<std::int64_t> counts(std::size_t{1} << joint_bits, 0);
    std::vector<std::uint64_t> touched;
    Vector o(size), op(psize);
    auto flush = [&](int b) {
      for (std::uint64_t idx : touched) {
        const double c = static_cast<double>(counts[idx]);
        for (int a = 0; a < size; ++a) o[a] = evaluate_mask(masks[a], idx & low);
        set.batch_counts[b] += counts[idx];
        set.batch_first.row(b) += c * o.transpose();
        set.batch_second[b].noalias() += c * o * o.transpose();
        if (previous_basis) {
          for (int a = 0; a < psize; ++a)
            op[a] = evaluate_mask(pmasks[a], idx >> ensemble.dimension);
          set.batch_previous_first.row(b) += c * op.transpose();
          set.batch_cross[b].noalias() += c * o * op.transpose();
        }
        counts[idx] = 0;
      }
      touched.clear();
    };
    int current = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const int b = static_cast<int>((i * batches) / n);
      if (b != current) {
        flush(current);
        current = b;
      }
      std::uint64_t idx = state_of(ensemble.sample(i));
      if (previous_basis) idx |= state_of(ensemble.previous(i)) << ensemble.dimension;
      if (counts[idx]++ == 0) touched.push_back(idx);
    }
    flush(current);
  } else {
    Vector o(size);
    Vector op(psize);
    for (std::int64_t i = 0; i < n; ++i) {
      const int b = static_cast<int>((i * batches) / n);
      evaluate_all(basis, ensemble.sample(i), o);
      ++set.batch_counts[b];
      set.batch_first.row(b) += o.transpose();
      set.batch_second[b].selfadjointView<Eigen::Lower>().rankUpdate(o);
      if (previous_basis) {
        evaluate_all(*previous_basis, ensemble.previous(i), op);
        set.batch_previous_first.row(b) += op.transpose();
        set.batch_cross[b].noalias() += o * op.transpose();
      }
    }
    for (auto &m : set.batch_second) m = m.selfadjointView<Eigen::Lower>();
  }

  std::vector<int> all(batches);
  for (int b = 0; b < batches; ++b) all[b] = b;
  ExpectationSet totals = set.resampled(all);
  set.first_moments = totals.first_moments;
  set.second_moments = totals.second_moments;
  if (previous_basis) {
    set.cross_moments = totals.cross_moments;
    set.previous_first_moments = totals.previous_first_moments;
  }
  return set;
}

/// Exact moments of a layer distribution (no cross block).
inline ExpectationSet exact_expectation_set(const ExactDistribution &dist,
                                            const OperatorBasis &basis) {
  ExpectationSet set;
  set.layer_index = dist.layer_index;
  set.basis = basis;
  set.exact = true;
  set.first_moments = exact_expectations(dist, basis);
  set.second_moments = exact_second_moments(dist, basis);
  return set;
}

/// Exact moments of the layer reached from q_prev through `kernel`, including
/// the between-layer block.
inline ExpectationSet exact_expectation_set(const ExactDistribution &previous,
                                            const RbmLayer &kernel,
                                            const OperatorBasis &previous_basis,
                                            const OperatorBasis &basis) {
  const ExactDistribution next(previous.layer_index + 1, kernel.n_out(),
                               push_forward(previous.probabilities, kernel));
  ExpectationSet set = exact_expectation_set(next, basis);
  set.previous_basis = previous_basis;
  set.cross_moments = exact_cross_moments(previous.probabilities, kernel, previous_basis, basis);
  set.previous_first_moments = exact_expectations(previous, previous_basis);
  return set;
}

/// Exact expectation sets of layers 1..N for input x (bases[k-1] on layer k).
inline std::vector<ExpectationSet> exact_expectation_sets(const DeepStack &stack,
                                                          const InputPoint &x,
                                                          const std::vector<OperatorBasis> &bases,
                                                          int limit = kDefaultEnumerationLimit) {
  require(static_cast<int>(bases.size()) == stack.depth(),
          "exact_expectation_sets: one basis per layer required");
  std::vector<ExpectationSet> sets;
  ExactDistribution q = exact_layer_distribution(stack, x, 1, limit);
  sets.push_back(exact_expectation_set(q, bases[0]));
  for (int k = 2; k <= stack.depth(); ++k) {
    check_enumerable(k, stack.width(k), limit);
    sets.push_back(exact_expectation_set(q, stack.layers[k - 1], bases[k - 2], bases[k - 1]));
    q = ExactDistribution(k, stack.width(k), push_forward(q.probabilities, stack.layers[k - 1]));
  }
  return sets;
}

// --- stability matrix -----------------------------------------------------------

struct EigenMode {
  std::complex<double> eigenvalue;
  Eigen::VectorXcd eigenvector;  // unit norm, largest component real positive
  double stderr_magnitude = 0.0;
  bool relevant = false;

  double magnitude() const { return std::abs(eigenvalue); }
  double phase() const { return std::arg(eigenvalue); }
  bool is_real() const { return eigenvalue.imag() == 0.0; }
};

struct StabilityEstimate {
  int from_layer = 0;
  int to_layer = 0;
  Matrix matrix;  // |basis_{k+1}| x |basis_k|
  double condition_number = 0.0;
  double regularization = 0.0;  // relative
  double ridge_lambda = 0.0;    // absolute, regularization * sigma_max
  int bootstrap_resamples = 0;
  Matrix entry_stderr;
  std::vector<EigenMode> modes;  // empty when the layers differ in width

  bool square() const { return matrix.rows() == matrix.cols(); }
  bool has_relevant() const {
    return std::any_of(modes.begin(), modes.end(), [](const EigenMode &m) { return m.relevant; });
  }
};

struct StabilityOptions {
  double regularization = 1e-6;
  double relevance_margin = 0.05;
  int bootstrap_resamples = 200;
  std::uint64_t bootstrap_seed = 0;
};

/**
  Ridge least-squares solution of A T = B with lambda = reg * sigma_max(A):
  T = V diag(s / (s^2 + lambda^2)) U^T B.
*/
struct RidgeSolution {
  Matrix solution;
  double condition_number = 0.0;
  double lambda = 0.0;
};

inline RidgeSolution ridge_solve(const Matrix &a, const Matrix &b, double regularization) {
  require(regularization >= 0.0, "ridge_solve: regularization must be non-negative");
  require(a.rows() == b.rows(), "ridge_solve: row mismatch");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector &s = svd.singularValues();
  RidgeSolution out;
  const double smax = s.size() ? s[0] : 0.0;
  const double smin = s.size() ? s[s.size() - 1] : 0.0;
  out.condition_number = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  out.lambda = regularization * smax;
  if (regularization == 0.0 && (smax == 0.0 || smin <= 1e-13 * smax)) {
    std::ostringstream msg;
    msg << "coefficient matrix is numerically singular (condition number "
        << out.condition_number << "); pass a positive regularization";
    throw SingularSystemError(msg.str());
  }
  Vector filter(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    filter[i] = s[i] > 0.0 ? s[i] / (s[i] * s[i] + out.lambda * out.lambda) : 0.0;
  out.solution = svd.matrixV() * filter.asDiagonal() * svd.matrixU().transpose() * b;
  return out;
}

/// Coefficient and right-hand side of the MCRG linear system for T^(k+1).
inline std::pair<Matrix, Matrix> stability_system(const ExpectationSet &current,
                                                  const ExpectationSet &next) {
  require(next.has_cross(), "solve_stability: next-layer moments lack the between-layer block");
  require(*next.previous_basis == current.basis,
          "solve_stability: bases of consecutive moment sets do not match");
  const Vector &m1 = next.first_moments;
  Matrix a = m1 * m1.transpose() - next.second_moments;
  Matrix b = m1 * current.first_moments.transpose() - next.cross_moments;
  return {std::move(a), std::move(b)};
}

inline Matrix solve_stability_matrix(const ExpectationSet &current, const ExpectationSet &next,
                                     double regularization) {
  auto [a, b] = stability_system(current, next);
  return ridge_solve(a, b, regularization).solution;
}

namespace detail {

inline bool mode_order(const EigenMode &x, const EigenMode &y) {
  const double mx = x.magnitude();
  const double my = y.magnitude();
  if (std::abs(mx - my) > 1e-12 * std::max(1.0, std::max(mx, my))) return mx > my;
  return x.phase() > y.phase();
}

inline std::vector<double> sorted_magnitudes(const Matrix &t) {
  Eigen::EigenSolver<Matrix> solver(t, false);
  std::vector<double> mags;
  if (solver.info() != Eigen::Success) return mags;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    mags.push_back(std::abs(solver.eigenvalues()[i]));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return mags;
}

}  // namespace detail

/**
  General eigen-decomposition of T. Modes are sorted by |Lambda| descending
  (conjugate pairs: positive phase first) and flagged relevant when
  |Lambda| > 1 + margin + stderr.
*/
inline std::vector<EigenMode> eigen_analysis(const Matrix &t, double margin,
                                             const Vector &stderr_by_rank = Vector()) {
  require(t.rows() == t.cols(), "eigen_analysis: matrix must be square");
  require(t.allFinite(), "eigen_analysis: non-finite matrix entry");
  Eigen::EigenSolver<Matrix> solver(t, true);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigen_analysis: eigensolver did not converge for matrix\n" << t;
    throw std::runtime_error(msg.str());
  }
  std::vector<EigenMode> modes(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    auto &mode = modes[i];
    mode.eigenvalue = solver.eigenvalues()[i];
    Eigen::VectorXcd v = solver.eigenvectors().col(i);
    v.normalize();
    Eigen::Index lead = 0;
    v.cwiseAbs().maxCoeff(&lead);
    v *= std::conj(v[lead]) / std::abs(v[lead]);
    mode.eigenvector = v;
  }
  std::sort(modes.begin(), modes.end(), detail::mode_order);
  for (std::size_t r = 0; r < modes.size(); ++r) {
    modes[r].stderr_magnitude =
        static_cast<Eigen::Index>(r) < stderr_by_rank.size() ? stderr_by_rank[r] : 0.0;
    modes[r].relevant = modes[r].magnitude() > 1.0 + margin + modes[r].stderr_magnitude;
  }
  return modes;
}

/**
  T^(k+1) from the moments of layers k and k+1 by ridge least squares,
  with chain-bootstrap error bars on entries and eigenvalue magnitudes.
*/
inline StabilityEstimate solve_stability(const ExpectationSet &current,
                                         const ExpectationSet &next,
                                         const StabilityOptions &options = {}) {
  auto [a, b] = stability_system(current, next);
  const RidgeSolution ridge = ridge_solve(a, b, options.regularization);

  StabilityEstimate est;
  est.from_layer = current.layer_index;
  est.to_layer = next.layer_index;
  est.matrix = ridge.solution;
  est.condition_number = ridge.condition_number;
  est.regularization = options.regularization;
  est.ridge_lambda = ridge.lambda;
  est.entry_stderr = Matrix::Zero(est.matrix.rows(), est.matrix.cols());

  const bool sampled = !current.exact && !next.exact && next.batches() > 1;
  Vector eig_stderr;
  if (sampled && options.bootstrap_resamples > 1) {
    require(current.batches() == next.batches(),
            "solve_stability: moment sets come from different propagations");
    const int batches = next.batches();
    Rng rng(options.bootstrap_seed);
    std::uniform_int_distribution<int> pick(0, batches - 1);
    Matrix sum = Matrix::Zero(est.matrix.rows(), est.matrix.cols());
    Matrix sum_sq = sum;
    std::vector<std::vector<double>> mags;
    std::vector<int> picks(batches);
    for (int r = 0; r < options.bootstrap_resamples; ++r) {
      for (auto &p : picks) p = pick(rng);
      const Matrix tr = solve_stability_matrix(current.resampled(picks), next.resampled(picks),
                                               std::max(options.regularization, 1e-12));
      sum += tr;
      sum_sq += tr.cwiseProduct(tr);
      if (est.square()) mags.push_back(detail::sorted_magnitudes(tr));
    }
    const double n = options.bootstrap_resamples;
    est.entry_stderr =
        ((sum_sq / n - (sum / n).cwiseProduct(sum / n)) * (n / (n - 1.0))).cwiseMax(0.0).cwiseSqrt();
    est.bootstrap_resamples = options.bootstrap_resamples;
    if (est.square()) {
      eig_stderr = Vector::Zero(est.matrix.rows());
      for (Eigen::Index rank = 0; rank < eig_stderr.size(); ++rank) {
        double s1 = 0.0, s2 = 0.0;
        int count = 0;
        for (const auto &m : mags) {
          if (static_cast<Eigen::Index>(m.size()) <= rank) continue;
          s1 += m[rank];
          s2 += m[rank] * m[rank];
          ++count;
        }
        if (count > 1)
          eig_stderr[rank] = std::sqrt(std::max(0.0, (s2 - s1 * s1 / count) / (count - 1)));
      }
    }
  }
  if (est.square()) est.modes = eigen_analysis(est.matrix, options.relevance_margin, eig_stderr);
  return est;
}

// --- flow report ------------------------------------------------------------------

struct FlowConfig {
  std::int64_t n_chains = 100000;
  int max_degree = 2;
  double regularization = 1e-6;
  double relevance_margin = 0.05;
  int bootstrap_resamples = 200;
  int bootstrap_batches = 256;
  bool exact_moments = false;  // enumerate instead of sampling
  int enumeration_limit = kDefaultEnumerationLimit;
  std::uint64_t seed = 1;
};

struct FlowReport {
  int input_index = 0;
  std::optional<int> label;
  std::vector<OperatorBasis> bases;            // one per layer
  std::vector<ExpectationSet> expectations;    // one per layer
  std::vector<std::optional<double>> distances;  // |<O>^(k+1) - <O>^(k)|, equal widths only
  std::vector<StabilityEstimate> transitions;  // k -> k+1 for k = 1..N-1
  std::vector<std::optional<double>> top_magnitudes;
};

struct ClassSummary {
  std::map<int, double> within_class_mean;  // per class, over pairs
  std::optional<double> within_mean;
  std::optional<double> across_mean;
};

struct FlowSummary {
  std::vector<FlowReport> reports;
  ClassSummary classes;
};

inline std::vector<OperatorBasis> layer_bases(const DeepStack &stack, int max_degree) {
  std::vector<OperatorBasis> bases;
  for (int k = 1; k <= stack.depth(); ++k)
    bases.push_back(enumerate_basis(stack.width(k), std::min(max_degree, stack.width(k))));
  return bases;
}

/// Stream seeds for one input of a flow run.
inline std::uint64_t propagate_seed(std::uint64_t root, int input_index) {
  return derive_seed(derive_seed(root, "propagate"), static_cast<std::uint64_t>(input_index));
}
inline std::uint64_t bootstrap_seed(std::uint64_t root, int input_index, int transition) {
  return derive_seed(
      derive_seed(derive_seed(root, "bootstrap"), static_cast<std::uint64_t>(input_index)),
      static_cast<std::uint64_t>(transition));
}

/// Moments and stability matrices along the flow of a single input.
inline FlowReport flow_for_input(const DeepStack &stack, const InputPoint &x, int input_index,
                                 const FlowConfig &config) {
  stack.validate();
  FlowReport report;
  report.input_index = input_index;
  report.label = x.label;
  report.bases = layer_bases(stack, config.max_degree);

  if (config.exact_moments) {
    report.expectations = exact_expectation_sets(stack, x, report.bases, config.enumeration_limit);
  } else {
    const auto ensembles =
        propagate(stack, x, config.n_chains, propagate_seed(config.seed, input_index));
    for (int k = 1; k <= stack.depth(); ++k)
      report.expectations.push_back(estimate_expectations(
          ensembles[k - 1], report.bases[k - 1], k > 1 ? &report.bases[k - 2] : nullptr,
          config.bootstrap_batches));
  }

  for (int k = 1; k < stack.depth(); ++k) {
    const auto &cur = report.expectations[k - 1];
    const auto &nxt = report.expectations[k];
    if (cur.basis.dimension == nxt.basis.dimension && cur.basis == nxt.basis)
      report.distances.push_back((nxt.first_moments - cur.first_moments).norm());
    else
      report.distances.push_back(std::nullopt);

    StabilityOptions options;
    options.regularization = config.regularization;
    options.relevance_margin = config.relevance_margin;
    options.bootstrap_resamples = config.bootstrap_resamples;
    options.bootstrap_seed = bootstrap_seed(config.seed, input_index, k);
    report.transitions.push_back(solve_stability(cur, nxt, options));
    const auto &modes = report.transitions.back().modes;
    report.top_magnitudes.push_back(modes.empty() ? std::nullopt
                                                  : std::optional<double>(modes[0].magnitude()));
  }
  return report;
}

/// Distance-based check that inputs of one class reach the same deep state.
inline ClassSummary summarize_classes(const std::vector<FlowReport> &reports) {
  ClassSummary summary;
  std::map<int, std::pair<double, int>> within;
  double within_sum = 0.0, across_sum = 0.0;
  int within_count = 0, across_count = 0;
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (std::size_t j = i + 1; j < reports.size(); ++j) {
      if (!reports[i].label || !reports[j].label) continue;
      const double d = (reports[i].expectations.back().first_moments -
                        reports[j].expectations.back().first_moments)
                           .norm();
      if (*reports[i].label == *reports[j].label) {
        auto &w = within[*reports[i].label];
        w.first += d;
        ++w.second;
        within_sum += d;
        ++within_count;
      } else {
        across_sum += d;
        ++across_count;
      }
    }
  for (const auto &[label, acc] : within) summary.within_class_mean[label] = acc.first / acc.second;
  if (within_count) summary.within_mean = within_sum / within_count;
  if (across_count) summary.across_mean = across_sum / across_count;
  return summary;
}

inline FlowSummary flow_report(const DeepStack &stack, const std::vector<InputPoint> &inputs,
                               const FlowConfig &config) {
  require(!inputs.empty(), "flow_report: at least one input required");
  FlowSummary summary;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    summary.reports.push_back(flow_for_input(stack, inputs[i], static_cast<int>(i), config));
  summary.classes = summarize_classes(summary.reports);
  return summary;
}

}  // namespace rgaudit

#endif  // RGAUDIT_MCRG_HPP
