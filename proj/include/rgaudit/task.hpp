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

#ifndef RGAUDIT_TASK_HPP
#define RGAUDIT_TASK_HPP

#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "common.hpp"
#include "rbm.hpp"

namespace rgaudit {

inline int hamming(const BitVector &a, const BitVector &b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

/**
  Prototype-noise classification task: draw y from the priors, then flip
  each bit of prototype y independently with probability flip_noise. The
  posterior is closed form,
    p(y|x) ~ prior_y rho^d(x, proto_y) (1 - rho)^(n - d(x, proto_y)).
*/
struct TaskSpec {
  int n_in = 0;
  int n_classes = 0;
  std::vector<BitVector> prototypes;
  double flip_noise = 0.1;
  std::vector<double> priors;
  std::uint64_t seed = 1;

  void validate() const {
    require(n_in >= 1, "TaskSpec: n_in must be >= 1");
    require(n_classes >= 1, "TaskSpec: n_classes must be >= 1");
    require(static_cast<int>(prototypes.size()) == n_classes,
            "TaskSpec: one prototype per class required");
    require(static_cast<int>(priors.size()) == n_classes, "TaskSpec: one prior per class required");
    require(flip_noise >= 0.0 && flip_noise < 0.5, "TaskSpec: flip_noise must lie in [0, 0.5)");
    std::set<BitVector> distinct;
    for (const auto &p : prototypes) {
      require(static_cast<int>(p.size()) == n_in, "TaskSpec: prototype dimension mismatch");
      for (auto b : p) require(b <= 1, "TaskSpec: prototypes must be binary");
      distinct.insert(p);
    }
    require(static_cast<int>(distinct.size()) == n_classes, "TaskSpec: prototypes must be distinct");
    double total = 0.0;
    for (double p : priors) {
      require(p > 0.0, "TaskSpec: priors must be positive");
      total += p;
    }
    require(std::abs(total - 1.0) < 1e-9, "TaskSpec: priors must sum to 1");
  }
};

/// Task with uniform priors and well-separated random prototypes (for two
/// classes the second prototype is the complement of the first).
inline TaskSpec make_task(int n_in, int n_classes, double flip_noise, std::uint64_t seed) {
  require(n_in >= 1 && n_classes >= 1, "make_task: sizes must be positive");
  require(n_in >= 63 || (std::uint64_t{1} << n_in) >= static_cast<std::uint64_t>(n_classes),
          "make_task: more classes than distinct prototypes");
  TaskSpec task;
  task.n_in = n_in;
  task.n_classes = n_classes;
  task.flip_noise = flip_noise;
  task.seed = seed;
  task.priors.assign(n_classes, 1.0 / n_classes);
  Rng rng(derive_seed(seed, "prototypes"));
  auto random_bits = [&] {
    BitVector b(n_in);
    for (auto &bit : b) bit = uniform01(rng) < 0.5;
    return b;
  };
  task.prototypes.push_back(random_bits());
  if (n_classes == 2) {
    BitVector c = task.prototypes[0];
    for (auto &bit : c) bit = 1 - bit;
    task.prototypes.push_back(c);
  }
  while (static_cast<int>(task.prototypes.size()) < n_classes) {
    // Best of a few candidates by minimum Hamming distance to the others.
    BitVector best;
    int best_distance = -1;
    for (int attempt = 0; attempt < 256; ++attempt) {
      BitVector candidate = random_bits();
      int d = n_in;
      for (const auto &p : task.prototypes) d = std::min(d, hamming(candidate, p));
      if (d > best_distance) {
        best_distance = d;
        best = candidate;
      }
    }
    if (best_distance == 0) continue;
    task.prototypes.push_back(best);
  }
  task.validate();
  return task;
}

/// Closed-form p(y|x) of the task.
inline Vector posterior(const TaskSpec &task, const BitVector &x) {
  require(static_cast<int>(x.size()) == task.n_in, "posterior: input dimension mismatch");
  Vector logw(task.n_classes);
  const double rho = task.flip_noise;
  for (int c = 0; c < task.n_classes; ++c) {
    const int d = hamming(x, task.prototypes[c]);
    if (rho == 0.0) {
      logw[c] = d == 0 ? std::log(task.priors[c]) : -std::numeric_limits<double>::infinity();
    } else {
      logw[c] = std::log(task.priors[c]) + d * std::log(rho) + (task.n_in - d) * std::log1p(-rho);
    }
  }
  const double top = logw.maxCoeff();
  require(std::isfinite(top), "posterior: input has zero probability under the task");
  Vector w = (logw.array() - top).exp().matrix();
  return w / w.sum();
}

/// Marginal probability of x under the task.
inline double input_probability(const TaskSpec &task, const BitVector &x) {
  double p = 0.0;
  for (int c = 0; c < task.n_classes; ++c) {
    const int d = hamming(x, task.prototypes[c]);
    p += task.priors[c] * std::pow(task.flip_noise, d) *
         std::pow(1.0 - task.flip_noise, task.n_in - d);
  }
  return p;
}

inline std::vector<LabeledSample> gen_data(const TaskSpec &task, std::int64_t n_samples) {
  task.validate();
  require(n_samples >= 1, "gen_data: n_samples must be >= 1");
  Rng rng(derive_seed(task.seed, "data"));
  std::vector<double> cumulative(task.priors.size());
  std::partial_sum(task.priors.begin(), task.priors.end(), cumulative.begin());
  std::vector<LabeledSample> data;
  data.reserve(n_samples);
  for (std::int64_t s = 0; s < n_samples; ++s) {
    const double u = uniform01(rng) * cumulative.back();
    int y = 0;
    while (y + 1 < task.n_classes && u >= cumulative[y]) ++y;
    LabeledSample sample;
    sample.y = y;
    sample.x = task.prototypes[y];
    for (auto &bit : sample.x)
      if (uniform01(rng) < task.flip_noise) bit = 1 - bit;
    data.push_back(std::move(sample));
  }
  return data;
}

}  // namespace rgaudit

#endif  // RGAUDIT_TASK_HPP
