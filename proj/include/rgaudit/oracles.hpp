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

#ifndef RGAUDIT_ORACLES_HPP
#define RGAUDIT_ORACLES_HPP

#include <functional>
#include <string>
#include <vector>

#include "exact.hpp"
#include "fim.hpp"
#include "io.hpp"
#include "mcrg.hpp"

namespace rgaudit {

/// One exact-vs-estimate comparison.
struct OracleRecord {
  std::string op;
  double max_abs_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  json details = json::object();
};

inline json to_json(const OracleRecord &r) {
  json j = {{"op", r.op},
            {"max_abs_err", std::isfinite(r.max_abs_err) ? json(r.max_abs_err) : json(nullptr)},
            {"tolerance", r.tolerance},
            {"pass", r.pass}};
  for (const auto &[k, v] : r.details.items()) j[k] = v;
  return j;
}

struct OracleConfig {
  std::uint64_t seed = 1;
  std::int64_t n_chains = 1000000;  // sampled comparisons
  int scaling_replicates = 12;
  int n_kernels = 20;
  int n_stacks = 10;
  int max_nodes = 4;                     // widest layer of the random stacks
  std::vector<int> layer_sizes = {3, 3};  // stack used for the propagation check
  std::int64_t tv_chains = 100000;
  int relevance_seeds = 5;
  int max_degree = 2;
  int enumeration_limit = kDefaultEnumerationLimit;
};

inline OracleConfig oracle_config_from_json(const json &j, OracleConfig c = {}) {
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("n_chains")) c.n_chains = j.at("n_chains").get<std::int64_t>();
    if (j.contains("scaling_replicates"))
      c.scaling_replicates = j.at("scaling_replicates").get<int>();
    if (j.contains("n_kernels")) c.n_kernels = j.at("n_kernels").get<int>();
    if (j.contains("n_stacks")) c.n_stacks = j.at("n_stacks").get<int>();
    if (j.contains("max_nodes")) c.max_nodes = j.at("max_nodes").get<int>();
    if (j.contains("layer_sizes")) c.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    if (j.contains("tv_chains")) c.tv_chains = j.at("tv_chains").get<std::int64_t>();
    if (j.contains("relevance_seeds")) c.relevance_seeds = j.at("relevance_seeds").get<int>();
    if (j.contains("max_degree")) c.max_degree = j.at("max_degree").get<int>();
    if (j.contains("enumeration_limit"))
      c.enumeration_limit = j.at("enumeration_limit").get<int>();
  } catch (const json::exception &e) {
    throw SchemaError(std::string("oracle config: ") + e.what());
  }
  return c;
}

// --- random test objects -------------------------------------------------------------

inline RbmLayer random_layer(int n_out, int n_in, double scale, Rng &rng) {
  std::normal_distribution<double> normal(0.0, scale);
  RbmLayer layer(n_out, n_in);
  for (Eigen::Index j = 0; j < n_out; ++j) {
    for (Eigen::Index i = 0; i < n_in; ++i) layer.weights(j, i) = normal(rng);
    layer.hidden_bias[j] = normal(rng);
  }
  for (Eigen::Index i = 0; i < n_in; ++i) layer.visible_bias[i] = normal(rng);
  return layer;
}

inline DeepStack random_stack(const std::vector<int> &widths, double scale, Rng &rng) {
  require(widths.size() >= 2, "random_stack: need input width and at least one layer");
  DeepStack stack;
  for (std::size_t k = 1; k < widths.size(); ++k)
    stack.layers.push_back(random_layer(widths[k], widths[k - 1], scale, rng));
  return stack;
}

/// Strictly positive distribution from Gaussian couplings on the full basis.
inline Vector random_distribution(int n, double scale, Rng &rng) {
  std::normal_distribution<double> normal(0.0, scale);
  CouplingVector g;
  g.basis = enumerate_basis(n, n);
  g.values.resize(g.basis.size());
  for (auto &v : g.values) v = normal(rng);
  return distribution_from_couplings(g);
}

inline Vector random_interior_point(int n, Rng &rng, double lo = 0.2, double hi = 0.8) {
  Vector x(n);
  for (auto &v : x) v = lo + (hi - lo) * uniform01(rng);
  return x;
}

inline Vector random_unit(int n, Rng &rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (auto &c : v) c = normal(rng);
  return v / v.norm();
}

/// Diagonal kernel copying h' to h up to flips with probability logistic(-s).
inline RbmLayer identity_like_kernel(int n, double saturation) {
  return RbmLayer(2.0 * saturation * Matrix::Identity(n, n), Vector::Constant(n, -saturation),
                  Vector::Zero(n));
}

/// Two-layer stack reaching a 3-node layer whose next kernel has a relevant
/// direction in the degree-2 basis.
inline DeepStack engineered_relevant_stack() {
  Matrix w2(3, 3);
  w2 << 0.53, 0.99, -4.37, -0.07, 2.64, -4.35, -2.12, -2.28, -7.9;
  Vector a2(3);
  a2 << 3.4, 3.59, 1.04;
  Vector a1(3);
  a1 << -6.6, -4.92, -0.88;  // fields at x = (0.5, 0.5, 0.5) after the shift below
  DeepStack stack;
  stack.layers.emplace_back(Matrix::Identity(3, 3), (a1.array() - 0.5).matrix(), Vector::Zero(3));
  stack.layers.emplace_back(w2, a2, Vector::Zero(3));
  return stack;
}

inline InputPoint engineered_input() { return InputPoint(Vector::Constant(3, 0.5)); }

/// Fixed layer 1 feeding the 2-node sampled comparisons.
inline DeepStack two_node_stack(const RbmLayer &kernel) {
  Matrix w1(2, 2);
  w1 << 1.0, -0.5, 0.3, 0.8;
  Vector a1(2);
  a1 << -0.2, 0.1;
  DeepStack stack;
  stack.layers.emplace_back(w1, a1, Vector::Zero(2));
  stack.layers.push_back(kernel);
  return stack;
}

inline InputPoint two_node_input() {
  Vector x(2);
  x << 0.6, 0.4;
  return InputPoint(x);
}

// --- individual oracles ------------------------------------------------------------

inline double max_abs(const Matrix &m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// MCRG solve on exact moments vs jacobian_fd on random kernels (full basis).
inline OracleRecord oracle_exact_solve(int n_kernels, std::uint64_t seed) {
  OracleRecord r{"exact_solve_vs_jacobian_fd", 0.0, 1e-6, false, json::object()};
  Rng rng(derive_seed(seed, "exact-solve"));
  json per = json::array();
  for (int i = 0; i < n_kernels; ++i) {
    const int n = i % 2 == 0 ? 2 : 3;
    const RbmLayer kernel = random_layer(n, n, 1.0, rng);
    const OperatorBasis basis = enumerate_basis(n, n);
    const ExactDistribution q(0, n, random_distribution(n, 0.5, rng));
    const CouplingVector at = couplings_from_distribution(q.probabilities, basis);
    const Matrix fd = jacobian_fd(kernel, at);
    const StabilityEstimate est = solve_stability(
        exact_expectation_set(q, basis), exact_expectation_set(q, kernel, basis, basis),
        {0.0, 0.05, 0, 0});
    const double err = max_abs(est.matrix - fd);
    r.max_abs_err = std::max(r.max_abs_err, err);
    per.push_back({{"nodes", n}, {"max_abs_err", err}});
  }
  r.pass = n_kernels > 0 && r.max_abs_err <= r.tolerance;
  r.details["kernels"] = per;
  return r;
}

/// Sampled T on the fixed 2-node stack (full basis) minus the jacobian_fd
/// reference at the exact layer-1 couplings.
inline Matrix sampled_error(const RbmLayer &kernel, std::int64_t n_chains, std::uint64_t seed,
                            int bootstrap_resamples = 0, StabilityEstimate *estimate = nullptr) {
  const DeepStack stack = two_node_stack(kernel);
  const InputPoint x = two_node_input();
  const OperatorBasis basis = enumerate_basis(2, 2);
  const ExactDistribution q1 = exact_layer_distribution(stack, x, 1);
  const Matrix fd = jacobian_fd(kernel, couplings_from_distribution(q1.probabilities, basis));
  FlowConfig config;
  config.n_chains = n_chains;
  config.max_degree = 2;
  config.bootstrap_resamples = bootstrap_resamples;
  config.seed = seed;
  const FlowReport report = flow_for_input(stack, x, 0, config);
  if (estimate) *estimate = report.transitions[0];
  return report.transitions[0].matrix - fd;
}

inline RbmLayer random_two_node_kernel(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "random-kernel"));
  return random_layer(2, 2, 1.0, rng);
}

inline constexpr double kIdentitySaturation = 4.0;

/// Sampled T vs jacobian_fd at one chain count.
inline OracleRecord oracle_sampled_kernel(const std::string &name, const RbmLayer &kernel,
                                          std::int64_t n_chains, std::uint64_t seed) {
  OracleRecord r{"sampled_solve_" + name, 0.0, 0.05, false, json::object()};
  StabilityEstimate est;
  const Matrix err = sampled_error(kernel, n_chains, seed, 200, &est);
  r.max_abs_err = max_abs(err);
  r.pass = r.max_abs_err <= r.tolerance;
  r.details = {{"n_chains", n_chains},
               {"max_entry_stderr", max_abs(est.entry_stderr)},
               {"matrix", to_json(est.matrix)}};
  return r;
}

/**
  Error scaling: RMS over replicates of the max-abs error at n and 4n
  chains. The ratio should be 1/2; accepted within [0.25, 0.75].
*/
inline OracleRecord oracle_sampled_scaling(const std::string &name, const RbmLayer &kernel,
                                           std::int64_t n_chains, int replicates,
                                           std::uint64_t seed) {
  OracleRecord r{"sampled_scaling_" + name, 0.0, 0.25, false, json::object()};
  double s_small = 0.0, s_large = 0.0;
  for (int rep = 0; rep < replicates; ++rep) {
    const std::uint64_t base = derive_seed(derive_seed(seed, "scaling"), rep);
    const double e1 = max_abs(sampled_error(kernel, n_chains, derive_seed(base, "n")));
    const double e4 = max_abs(sampled_error(kernel, 4 * n_chains, derive_seed(base, "4n")));
    s_small += e1 * e1;
    s_large += e4 * e4;
  }
  const double rms_small = std::sqrt(s_small / replicates);
  const double rms_large = std::sqrt(s_large / replicates);
  const double ratio = rms_small > 0.0 ? rms_large / rms_small : 0.0;
  r.max_abs_err = std::abs(ratio - 0.5);
  r.pass = replicates > 0 && rms_small > 0.0 && r.max_abs_err <= r.tolerance;
  r.details = {{"n_chains", n_chains},
               {"replicates", replicates},
               {"rms_error_n", rms_small},
               {"rms_error_4n", rms_large},
               {"ratio", ratio}};
  return r;
}

/// Exact T's between consecutive moment sets (regularization 0).
inline std::vector<StabilityEstimate> exact_transitions(const std::vector<ExpectationSet> &sets) {
  std::vector<StabilityEstimate> ts;
  for (std::size_t k = 0; k + 1 < sets.size(); ++k)
    ts.push_back(solve_stability(sets[k], sets[k + 1], {0.0, 0.05, 0, 0}));
  return ts;
}

inline std::vector<OperatorBasis> full_bases(const DeepStack &stack) {
  std::vector<OperatorBasis> bases;
  for (int k = 1; k <= stack.depth(); ++k)
    bases.push_back(enumerate_basis(stack.width(k), stack.width(k)));
  return bases;
}

/// Fully exact chain-rule FIM of stack at x.
inline FimMatrix exact_chain_fim(const DeepStack &stack, const InputPoint &x,
                                 int limit = kDefaultEnumerationLimit) {
  const auto bases = full_bases(stack);
  const auto sets = exact_expectation_sets(stack, x, bases, limit);
  const auto first = first_layer_jacobian(stack.layers[0], bases[0], x, JacobianMethod::analytic);
  const auto ts = exact_transitions(sets);
  return assemble_fim(chain_jacobian(first, ts), sets.back(), static_cast<int>(ts.size()));
}

inline std::vector<int> random_widths(int max_nodes, Rng &rng) {
  const int depth = 2 + static_cast<int>(uniform01(rng) * 2.0);  // 2 or 3 layers
  std::vector<int> widths;
  for (int k = 0; k <= depth; ++k) widths.push_back(2 + static_cast<int>(uniform01(rng) * (max_nodes - 1)));
  return widths;
}

inline double relative_frobenius(const Matrix &a, const Matrix &reference) {
  const double norm = reference.norm();
  return norm > 0.0 ? (a - reference).norm() / norm : (a - reference).norm();
}

/// Chain-rule FIM (exact mode) vs the finite-difference KL Hessian.
inline OracleRecord oracle_fim_chain(int n_stacks, int max_nodes, std::uint64_t seed) {
  OracleRecord r{"fim_chain_rule_vs_fim_fd", 0.0, 1e-4, false, json::object()};
  Rng rng(derive_seed(seed, "fim-chain"));
  json per = json::array();
  for (int i = 0; i < n_stacks; ++i) {
    const auto widths = random_widths(max_nodes, rng);
    const DeepStack stack = random_stack(widths, 1.0, rng);
    const InputPoint x(random_interior_point(widths[0], rng));
    const FimMatrix f = exact_chain_fim(stack, x);
    const FimFdResult fd = fim_fd(stack, x);
    const double err = relative_frobenius(f.matrix, fd.fim);
    r.max_abs_err = std::max(r.max_abs_err, err);
    per.push_back({{"widths", widths}, {"relative_frobenius", err}});
  }
  r.pass = n_stacks > 0 && r.max_abs_err <= r.tolerance;
  r.details["metric"] = "relative Frobenius error";
  r.details["stacks"] = per;
  return r;
}

/// KL(eps) / (eps^2 v^T F v / 2) along random directions, exact mode.
inline OracleRecord oracle_kl_quadratic(int n_directions, std::uint64_t seed) {
  OracleRecord r{"kl_quadratic_expansion", 0.0, 0.1, false, json::object()};
  Rng rng(derive_seed(seed, "kl-quadratic"));
  const DeepStack stack = random_stack({4, 3, 3}, 1.0, rng);
  const InputPoint x(random_interior_point(4, rng, 0.3, 0.7));
  const FimMatrix f = exact_chain_fim(stack, x);
  const Vector base = exact_output(stack, x.coordinates);
  json per = json::array();
  for (int d = 0; d < n_directions; ++d) {
    const Vector v = random_unit(4, rng);
    const double curvature = v.dot(f.matrix * v);
    for (double eps : {1e-2, 1e-3}) {
      const double kl = exact_kl(base, exact_output(stack, x.coordinates + eps * v));
      const double ratio = kl / (0.5 * eps * eps * curvature);
      r.max_abs_err = std::max(r.max_abs_err, std::abs(ratio - 1.0));
      per.push_back({{"direction", d}, {"epsilon", eps}, {"ratio", ratio}});
    }
  }
  r.pass = n_directions > 0 && r.max_abs_err <= r.tolerance;
  r.details["metric"] = "|ratio - 1|";
  r.details["ratios"] = per;
  return r;
}

/**
  Top vs bottom FIM eigenvector: KL along the top direction must exceed KL
  along the bottom one at every swept epsilon, on nets whose spectrum has
  lambda_max / lambda_min > 2. The reported error is the number of
  violations.
*/
inline OracleRecord oracle_dominance(int n_nets, std::uint64_t seed) {
  OracleRecord r{"directional_dominance", 0.0, 0.0, false, json::object()};
  Rng rng(derive_seed(seed, "dominance"));
  const std::vector<double> epsilons = {0.001, 0.005, 0.01, 0.02, 0.05};
  json per = json::array();
  int tested = 0, attempts = 0;
  while (tested < n_nets && attempts < 50 * n_nets) {
    ++attempts;
    const DeepStack stack = random_stack({3, 3, 2}, 1.5, rng);
    const InputPoint x(random_interior_point(3, rng));
    const FimMatrix f = exact_chain_fim(stack, x);
    const FimSpectrum s = fim_spectrum(f);
    const double lmax = s.eigenvalues[0];
    const double lmin = s.eigenvalues[s.eigenvalues.size() - 1];
    if (!(lmin > 0.0 && lmax / lmin > 2.0)) continue;
    ++tested;
    AttackConfig config;
    const auto top = evaluate_direction(stack, x, s.eigenvectors.col(0), epsilons, config);
    const auto bottom = evaluate_direction(
        stack, x, s.eigenvectors.col(s.eigenvectors.cols() - 1), epsilons, config);
    int violations = 0;
    for (std::size_t e = 0; e < epsilons.size(); ++e)
      if (!(top[e].kl > bottom[e].kl)) ++violations;
    r.max_abs_err += violations;
    per.push_back({{"lambda_ratio", lmax / lmin}, {"violations", violations}});
  }
  r.pass = tested == n_nets && r.max_abs_err == 0.0;
  r.details = {{"metric", "violations"}, {"nets", per}, {"epsilons", epsilons}};
  return r;
}

/// Couplings -> distribution round trip on random positive distributions.
inline OracleRecord oracle_coupling_roundtrip(int n_dists, int max_nodes, std::uint64_t seed) {
  OracleRecord r{"coupling_round_trip", 0.0, 1e-10, false, json::object()};
  Rng rng(derive_seed(seed, "round-trip"));
  for (int i = 0; i < n_dists; ++i) {
    const int n = 1 + i % max_nodes;
    Vector p(state_count(n));
    for (auto &v : p) v = 0.01 + uniform01(rng);
    p /= p.sum();
    const auto g = couplings_from_distribution(p, enumerate_basis(n, n));
    const double tv = 0.5 * (distribution_from_couplings(g) - p).cwiseAbs().sum();
    r.max_abs_err = std::max(r.max_abs_err, tv);
  }
  r.pass = n_dists > 0 && r.max_abs_err <= r.tolerance;
  r.details = {{"metric", "total variation"}, {"distributions", n_dists}};
  return r;
}

/// Engineered relevant kernel flagged, identity-like kernel not, over seeds.
inline OracleRecord oracle_relevance(std::int64_t n_chains, int n_seeds, std::uint64_t seed,
                                     int max_degree = 2) {
  OracleRecord r{"relevance_detection", 0.0, 0.0, false, json::object()};
  const DeepStack engineered = engineered_relevant_stack();
  const InputPoint x = engineered_input();
  FlowConfig config;
  config.n_chains = n_chains;
  config.max_degree = max_degree;

  FlowConfig exact_config = config;
  exact_config.exact_moments = true;
  exact_config.regularization = 0.0;
  const double exact_top = flow_for_input(engineered, x, 0, exact_config).top_magnitudes[0].value();

  DeepStack identity = engineered;
  identity.layers[1] = identity_like_kernel(3, 30.0);

  json per = json::array();
  int misses = 0;
  for (int s = 0; s < n_seeds; ++s) {
    config.seed = derive_seed(derive_seed(seed, "relevance"), s);
    const auto e = flow_for_input(engineered, x, 0, config).transitions[0];
    const auto i = flow_for_input(identity, x, 0, config).transitions[0];
    const bool ok = e.has_relevant() && !i.has_relevant();
    misses += !ok;
    per.push_back({{"engineered_top", e.modes[0].magnitude()},
                   {"engineered_stderr", e.modes[0].stderr_magnitude},
                   {"engineered_flagged", e.has_relevant()},
                   {"identity_top", i.modes[0].magnitude()},
                   {"identity_stderr", i.modes[0].stderr_magnitude},
                   {"identity_flagged", i.has_relevant()}});
  }
  r.max_abs_err = misses;
  r.pass = exact_top >= 1.3 && misses == 0 && n_seeds > 0;
  r.details = {{"metric", "seeds with a wrong call"},
               {"exact_top_magnitude", exact_top},
               {"n_chains", n_chains},
               {"seeds", per}};
  return r;
}

/// Analytic vs linear-solve vs finite differences of exact layer-1 couplings.
inline std::vector<OracleRecord> oracle_first_layer(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "first-layer"));
  const RbmLayer layer = random_layer(3, 3, 1.0, rng);
  const OperatorBasis basis = enumerate_basis(3, 3);
  const InputPoint x(random_interior_point(3, rng));
  const Matrix analytic =
      first_layer_jacobian(layer, basis, x, JacobianMethod::analytic).matrix;
  const Matrix solved =
      first_layer_jacobian(layer, basis, x, JacobianMethod::linear_solve).matrix;
  Matrix fd(basis.size(), 3);
  const double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    Vector xp = x.coordinates, xm = x.coordinates;
    xp[i] += h;
    xm[i] -= h;
    const auto gp = couplings_from_distribution(product_distribution(hidden_given_visible(layer, xp)), basis);
    const auto gm = couplings_from_distribution(product_distribution(hidden_given_visible(layer, xm)), basis);
    fd.col(i) = (gp.values - gm.values) / (2.0 * h);
  }
  OracleRecord a{"first_layer_analytic_vs_linear_solve", max_abs(analytic - solved), 1e-8, false,
                 json::object()};
  a.pass = a.max_abs_err <= a.tolerance;
  OracleRecord b{"first_layer_analytic_vs_fd", max_abs(analytic - fd), 1e-6, false,
                 json::object()};
  b.pass = b.max_abs_err <= b.tolerance;
  return {a, b};
}

/// Sampled layer distributions vs exact ones, total variation.
inline OracleRecord oracle_propagate(const std::vector<int> &layer_sizes, std::int64_t n_chains,
                                     std::uint64_t seed, int limit = kDefaultEnumerationLimit) {
  OracleRecord r{"propagate_vs_exact", 0.0, 0.02, false, json::object()};
  Rng rng(derive_seed(seed, "propagate-check"));
  std::vector<int> widths = {layer_sizes.empty() ? 1 : layer_sizes.front()};
  widths.insert(widths.end(), layer_sizes.begin(), layer_sizes.end());
  const DeepStack stack = random_stack(widths, 1.0, rng);
  const InputPoint x(random_interior_point(widths[0], rng));
  const auto ensembles = propagate(stack, x, n_chains, derive_seed(seed, "propagate"));
  json per = json::array();
  for (int k = 1; k <= stack.depth(); ++k) {
    const ExactDistribution q = exact_layer_distribution(stack, x, k, limit);
    Vector empirical = Vector::Zero(q.probabilities.size());
    const auto &e = ensembles[k - 1];
    for (std::size_t c = 0; c < e.size(); ++c) {
      const auto s = e.sample(c);
      empirical[static_cast<Eigen::Index>(bits_to_index(BitVector(s.begin(), s.end())))] += 1.0;
    }
    empirical /= static_cast<double>(e.size());
    const double tv = 0.5 * (empirical - q.probabilities).cwiseAbs().sum();
    r.max_abs_err = std::max(r.max_abs_err, tv);
    per.push_back({{"layer", k}, {"total_variation", tv}});
  }
  r.pass = r.max_abs_err <= r.tolerance;
  r.details = {{"metric", "total variation"}, {"n_chains", n_chains}, {"layers", per}};
  return r;
}

/// Refuses configurations whose layers cannot be enumerated.
inline void check_oracle_config(const OracleConfig &c) {
  require(c.max_nodes >= 2, "oracle config: max_nodes must be >= 2");
  require(c.max_degree >= 1, "oracle config: max_degree must be >= 1");
  require(!c.layer_sizes.empty(), "oracle config: layer_sizes must not be empty");
  require(c.n_chains >= 1 && c.tv_chains >= 1, "oracle config: chain counts must be positive");
  check_enumerable(0, c.layer_sizes.front(), c.enumeration_limit);
  for (std::size_t k = 0; k < c.layer_sizes.size(); ++k)
    check_enumerable(static_cast<int>(k) + 1, c.layer_sizes[k], c.enumeration_limit);
  if (c.max_nodes > c.enumeration_limit)
    throw EnumerationLimitError(1, c.max_nodes, c.enumeration_limit);
}

/**
  Runs every oracle. A comparison that throws (for example a sampled one
  given too few chains) is recorded as failed with the error message.
*/
inline std::vector<OracleRecord> oracle_check(const OracleConfig &c) {
  check_oracle_config(c);
  std::vector<OracleRecord> records;
  auto guarded = [&](const std::string &op, const std::function<void()> &run) {
    try {
      run();
    } catch (const std::exception &e) {
      OracleRecord r{op, std::numeric_limits<double>::infinity(), 0.0, false, json::object()};
      r.details["error"] = e.what();
      records.push_back(r);
    }
  };
  const RbmLayer identity = identity_like_kernel(2, kIdentitySaturation);
  const RbmLayer random = random_two_node_kernel(c.seed);

  guarded("coupling_round_trip",
          [&] { records.push_back(oracle_coupling_roundtrip(100, 8, c.seed)); });
  guarded("exact_solve_vs_jacobian_fd",
          [&] { records.push_back(oracle_exact_solve(c.n_kernels, c.seed)); });
  guarded("first_layer", [&] {
    for (auto &r : oracle_first_layer(c.seed)) records.push_back(r);
  });
  guarded("fim_chain_rule_vs_fim_fd",
          [&] { records.push_back(oracle_fim_chain(c.n_stacks, c.max_nodes, c.seed)); });
  guarded("kl_quadratic_expansion", [&] { records.push_back(oracle_kl_quadratic(3, c.seed)); });
  guarded("directional_dominance", [&] { records.push_back(oracle_dominance(5, c.seed)); });
  guarded("sampled_solve_identity", [&] {
    records.push_back(oracle_sampled_kernel("identity", identity, c.n_chains, c.seed));
  });
  guarded("sampled_solve_random", [&] {
    records.push_back(oracle_sampled_kernel("random", random, c.n_chains, c.seed));
  });
  guarded("sampled_scaling_identity", [&] {
    records.push_back(oracle_sampled_scaling("identity", identity, c.n_chains,
                                             c.scaling_replicates, c.seed));
  });
  guarded("sampled_scaling_random", [&] {
    records.push_back(
        oracle_sampled_scaling("random", random, c.n_chains, c.scaling_replicates, c.seed));
  });
  guarded("relevance_detection", [&] {
    records.push_back(oracle_relevance(c.n_chains, c.relevance_seeds, c.seed, c.max_degree));
  });
  guarded("propagate_vs_exact", [&] {
    records.push_back(oracle_propagate(c.layer_sizes, std::min(c.tv_chains, c.n_chains), c.seed,
                                       c.enumeration_limit));
  });
  return records;
}

}  // namespace rgaudit

#endif  // RGAUDIT_ORACLES_HPP
