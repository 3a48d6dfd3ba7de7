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

#ifndef RGAUDIT_RBM_HPP
#define RGAUDIT_RBM_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"

namespace rgaudit {

/**
  One binary RBM layer. The joint over (hidden h, visible v) is
  exp(h^T W v + a^T h + b^T v) / z; only the conditional t(h|v) is used for
  propagation, so the visible bias is carried along but never read there.
*/
struct RbmLayer {
  Matrix weights;       // n_out x n_in
  Vector hidden_bias;   // a, length n_out
  Vector visible_bias;  // b, length n_in

  RbmLayer() = default;
  RbmLayer(Matrix w, Vector a, Vector b)
      : weights(std::move(w)), hidden_bias(std::move(a)), visible_bias(std::move(b)) {
    validate();
  }

  /// Zero-initialized layer.
  RbmLayer(int n_out, int n_in)
      : weights(Matrix::Zero(n_out, n_in)),
        hidden_bias(Vector::Zero(n_out)),
        visible_bias(Vector::Zero(n_in)) {}

  int n_in() const { return static_cast<int>(weights.cols()); }
  int n_out() const { return static_cast<int>(weights.rows()); }

  void validate() const {
    require(weights.rows() == hidden_bias.size(),
            "RbmLayer: hidden bias length " + std::to_string(hidden_bias.size()) +
                " does not match weight rows " + std::to_string(weights.rows()));
    require(weights.cols() == visible_bias.size(),
            "RbmLayer: visible bias length " + std::to_string(visible_bias.size()) +
                " does not match weight columns " + std::to_string(weights.cols()));
    require(weights.rows() > 0 && weights.cols() > 0, "RbmLayer: empty layer");
    require(weights.allFinite() && hidden_bias.allFinite() && visible_bias.allFinite(),
            "RbmLayer: non-finite parameter");
  }
};

/// Training provenance stored alongside the weights.
struct StackMetadata {
  std::uint64_t seed = 0;
  int n_classes = 0;  // 0: no class readout configured
  int cd_steps = 0;
  double learning_rate = 0.0;
  int epochs = 0;
  std::optional<double> train_accuracy;
};

struct DeepStack {
  std::vector<RbmLayer> layers;
  StackMetadata meta;

  int depth() const { return static_cast<int>(layers.size()); }
  int n_in() const { return layers.front().n_in(); }
  int n_out() const { return layers.back().n_out(); }
  /// Width of layer k; k = 0 is the input.
  int width(int k) const { return k == 0 ? n_in() : layers.at(k - 1).n_out(); }

  void validate() const {
    require(!layers.empty(), "DeepStack: at least one layer required");
    for (std::size_t k = 0; k < layers.size(); ++k) {
      layers[k].validate();
      if (k > 0)
        require(layers[k].n_in() == layers[k - 1].n_out(),
                "DeepStack: layer " + std::to_string(k + 1) + " expects " +
                    std::to_string(layers[k].n_in()) + " inputs but layer " +
                    std::to_string(k) + " has " + std::to_string(layers[k - 1].n_out()) +
                    " units");
    }
  }
};

struct InputPoint {
  Vector coordinates;
  std::optional<int> label;

  InputPoint() = default;
  explicit InputPoint(Vector x, std::optional<int> y = std::nullopt)
      : coordinates(std::move(x)), label(y) {
    validate();
  }

  int dimension() const { return static_cast<int>(coordinates.size()); }

  void validate() const {
    for (Eigen::Index i = 0; i < coordinates.size(); ++i)
      require(std::isfinite(coordinates[i]) && coordinates[i] >= 0.0 && coordinates[i] <= 1.0,
              "InputPoint: coordinate " + std::to_string(i) + " outside [0,1]");
  }

  static InputPoint from_bits(const BitVector &bits, std::optional<int> y = std::nullopt) {
    Vector x(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) x[i] = bits[i];
    return InputPoint(std::move(x), y);
  }
};

/**
  Ancestral samples of one layer for a single input. Row i of `samples` was
  drawn from row i of `paired_previous` (for layer 1 the parent is the
  clamped input, stored once in `input`).
*/
struct LayerEnsemble {
  int layer_index = 0;
  int dimension = 0;
  int previous_dimension = 0;
  std::vector<std::uint8_t> samples;          // size() x dimension, row-major
  std::vector<std::uint8_t> paired_previous;  // size() x previous_dimension; empty for layer 1
  std::vector<std::int64_t> chain_ids;
  Vector input;                               // only for layer 1

  std::size_t size() const { return chain_ids.size(); }
  bool pairs_with_input() const { return layer_index == 1; }

  std::span<const std::uint8_t> sample(std::size_t i) const {
    return {samples.data() + i * dimension, static_cast<std::size_t>(dimension)};
  }
  std::span<const std::uint8_t> previous(std::size_t i) const {
    return {paired_previous.data() + i * previous_dimension,
            static_cast<std::size_t>(previous_dimension)};
  }
};

struct LabeledSample {
  BitVector x;
  int y = 0;
};

// --- conditionals and sampling ---------------------------------------------

/// p(h_j = 1 | v) = logistic((W v + a)_j); v may be real-valued.
inline Vector hidden_given_visible(const RbmLayer &layer, const Vector &v) {
  require(v.size() == layer.n_in(), "hidden_given_visible: visible vector has dimension " +
                                        std::to_string(v.size()) + ", layer expects " +
                                        std::to_string(layer.n_in()));
  Vector z = layer.weights * v + layer.hidden_bias;
  return z.unaryExpr([](double t) { return logistic(t); });
}

inline Vector hidden_given_visible(const RbmLayer &layer, std::span<const std::uint8_t> v) {
  require(static_cast<int>(v.size()) == layer.n_in(),
          "hidden_given_visible: visible vector has dimension " + std::to_string(v.size()) +
              ", layer expects " + std::to_string(layer.n_in()));
  Vector z = layer.hidden_bias;
  for (int i = 0; i < layer.n_in(); ++i)
    if (v[i]) z += layer.weights.col(i);
  return z.unaryExpr([](double t) { return logistic(t); });
}

/// p(v_i = 1 | h), used only by contrastive divergence.
inline Vector visible_given_hidden(const RbmLayer &layer, const Vector &h) {
  Vector z = layer.weights.transpose() * h + layer.visible_bias;
  return z.unaryExpr([](double t) { return logistic(t); });
}

template <class Gen>
inline void draw_bits(const Vector &p, Gen &rng, std::span<std::uint8_t> out) {
  for (Eigen::Index j = 0; j < p.size(); ++j) out[j] = uniform01(rng) < p[j] ? 1 : 0;
}

template <class Gen>
inline BitVector sample_layer(const RbmLayer &layer, const BitVector &v, Gen &rng) {
  for (auto bit : v) require(bit <= 1, "sample_layer: visible vector is not binary");
  const Vector p = hidden_given_visible(layer, std::span<const std::uint8_t>(v));
  BitVector h(layer.n_out());
  draw_bits(p, rng, h);
  return h;
}

/// Stream of chain `chain` under stage seed `seed`.
inline ChainRng chain_rng(std::uint64_t seed, std::int64_t chain) {
  return ChainRng(derive_seed(seed, static_cast<std::uint64_t>(chain)));
}

// Conditionals of a layer for every binary parent state (small layers only).
inline std::vector<Vector> conditional_table(const RbmLayer &layer) {
  std::vector<Vector> table(std::size_t{1} << layer.n_in());
  for (std::size_t s = 0; s < table.size(); ++s) {
    Vector z = layer.hidden_bias;
    for (int i = 0; i < layer.n_in(); ++i)
      if ((s >> i) & 1) z += layer.weights.col(i);
    table[s] = z.unaryExpr([](double t) { return logistic(t); });
  }
  return table;
}

inline constexpr int kConditionalTableLimit = 12;

/**
  Ancestral sampling of every layer for input x. Each chain draws from its
  own seed-derived stream, so the result does not depend on evaluation order.
*/
inline std::vector<LayerEnsemble> propagate(const DeepStack &stack, const InputPoint &x,
                                            std::int64_t n_chains, std::uint64_t seed) {
  stack.validate();
  require(x.dimension() == stack.n_in(), "propagate: input has dimension " +
                                             std::to_string(x.dimension()) + ", stack expects " +
                                             std::to_string(stack.n_in()));
  require(n_chains >= 1, "propagate: n_chains must be >= 1");

  const int depth = stack.depth();
  std::vector<LayerEnsemble> ensembles(depth);
  for (int k = 0; k < depth; ++k) {
    auto &e = ensembles[k];
    e.layer_index = k + 1;
    e.dimension = stack.layers[k].n_out();
    e.previous_dimension = stack.layers[k].n_in();
    e.samples.resize(static_cast<std::size_t>(n_chains) * e.dimension);
    if (k > 0) e.paired_previous.resize(static_cast<std::size_t>(n_chains) * e.previous_dimension);
    e.chain_ids.resize(n_chains);
  }
  ensembles[0].input = x.coordinates;

  const Vector first = hidden_given_visible(stack.layers[0], x.coordinates);
  std::vector<std::vector<Vector>> tables(depth);
  for (int k = 1; k < depth; ++k)
    if (stack.layers[k].n_in() <= kConditionalTableLimit)
      tables[k] = conditional_table(stack.layers[k]);
  for (std::int64_t c = 0; c < n_chains; ++c) {
    ChainRng rng = chain_rng(seed, c);
    for (int k = 0; k < depth; ++k) {
      auto &e = ensembles[k];
      e.chain_ids[c] = c;
      std::span<std::uint8_t> out(e.samples.data() + c * e.dimension, e.dimension);
      if (k == 0) {
        draw_bits(first, rng, out);
      } else {
        const auto parent = ensembles[k - 1].sample(c);
        std::copy(parent.begin(), parent.end(),
                  e.paired_previous.begin() + c * e.previous_dimension);
        if (tables[k].empty()) {
          draw_bits(hidden_given_visible(stack.layers[k], parent), rng, out);
        } else {
          std::size_t state = 0;
          for (std::size_t i = 0; i < parent.size(); ++i)
            if (parent[i]) state |= std::size_t{1} << i;
          draw_bits(tables[k][state], rng, out);
        }
      }
    }
  }
  return ensembles;
}

// --- class readout ------------------------------------------------------------

/// Per-class mean of output-unit marginals; output units form equal blocks.
inline Vector class_block_means(const Vector &output_marginals, int n_classes) {
  require(n_classes >= 1, "class readout: n_classes must be >= 1");
  const int n = static_cast<int>(output_marginals.size());
  require(n % n_classes == 0, "class readout: " + std::to_string(n) +
                                  " output units do not split into " +
                                  std::to_string(n_classes) + " equal blocks");
  const int block = n / n_classes;
  Vector means(n_classes);
  for (int c = 0; c < n_classes; ++c) means[c] = output_marginals.segment(c * block, block).mean();
  return means;
}

/// Argmax with ties broken toward the lower class index.
inline int argmax_class(const Vector &scores) {
  int best = 0;
  for (int c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

/// Target output configuration for a class: its block on, the rest off.
inline Vector class_code(int label, int n_out, int n_classes) {
  const int block = n_out / n_classes;
  Vector code = Vector::Zero(n_out);
  code.segment(label * block, block).setOnes();
  return code;
}

/// Sampled output marginals for input x (mean over chains of the last layer).
inline Vector sampled_output_marginals(const DeepStack &stack, const InputPoint &x,
                                       std::int64_t n_chains, std::uint64_t seed) {
  const auto ensembles = propagate(stack, x, n_chains, seed);
  const auto &last = ensembles.back();
  Vector m = Vector::Zero(last.dimension);
  for (std::size_t c = 0; c < last.size(); ++c) {
    const auto s = last.sample(c);
    for (int j = 0; j < last.dimension; ++j) m[j] += s[j];
  }
  return m / static_cast<double>(last.size());
}

// --- greedy layerwise training ------------------------------------------------

struct TrainConfig {
  std::vector<int> layer_sizes;  // widths of layers 1..N; the last holds class blocks
  int cd_steps = 1;
  double learning_rate = 0.1;
  int epochs = 30;
  int batch_size = 10;
  double init_scale = 0.01;
  int eval_chains = 256;
  std::uint64_t seed = 1;
};

struct TrainResult {
  DeepStack stack;
  double accuracy = 0.0;
};

namespace detail {

inline Vector to_vector(std::span<const std::uint8_t> bits) {
  Vector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) v[i] = bits[i];
  return v;
}

inline RbmLayer init_layer(int n_out, int n_in, double scale, Rng &rng) {
  std::normal_distribution<double> normal(0.0, scale);
  RbmLayer layer(n_out, n_in);
  for (Eigen::Index j = 0; j < layer.weights.rows(); ++j)
    for (Eigen::Index i = 0; i < layer.weights.cols(); ++i) layer.weights(j, i) = normal(rng);
  return layer;
}

// One CD-k minibatch update on binary visible rows.
inline void cd_update(RbmLayer &layer, const std::vector<Vector> &batch, int cd_steps,
                      double learning_rate, Rng &rng) {
  Matrix dw = Matrix::Zero(layer.n_out(), layer.n_in());
  Vector da = Vector::Zero(layer.n_out());
  Vector db = Vector::Zero(layer.n_in());
  BitVector h_bits(layer.n_out());
  for (const auto &v0 : batch) {
    const Vector h0 = hidden_given_visible(layer, v0);
    Vector vk = v0;
    Vector hk = h0;
    for (int step = 0; step < cd_steps; ++step) {
      draw_bits(hk, rng, h_bits);
      vk = visible_given_hidden(layer, detail::to_vector(h_bits));
      hk = hidden_given_visible(layer, vk);
    }
    dw += h0 * v0.transpose() - hk * vk.transpose();
    da += h0 - hk;
    db += v0 - vk;
  }
  const double scale = learning_rate / static_cast<double>(batch.size());
  layer.weights += scale * dw;
  layer.hidden_bias += scale * da;
  layer.visible_bias += scale * db;
}

// Maximum conditional likelihood of the class code given the visible row.
inline void output_update(RbmLayer &layer, const std::vector<Vector> &batch,
                          const std::vector<Vector> &targets, double learning_rate) {
  Matrix dw = Matrix::Zero(layer.n_out(), layer.n_in());
  Vector da = Vector::Zero(layer.n_out());
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const Vector err = targets[s] - hidden_given_visible(layer, batch[s]);
    dw += err * batch[s].transpose();
    da += err;
  }
  const double scale = learning_rate / static_cast<double>(batch.size());
  layer.weights += scale * dw;
  layer.hidden_bias += scale * da;
}

}  // namespace detail

inline double training_accuracy(const DeepStack &stack, const std::vector<LabeledSample> &data,
                                int eval_chains, std::uint64_t seed) {
  std::size_t correct = 0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const Vector m = sampled_output_marginals(stack, InputPoint::from_bits(data[s].x), eval_chains,
                                              derive_seed(seed, s));
    if (argmax_class(class_block_means(m, stack.meta.n_classes)) == data[s].y) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

/**
  Greedy layerwise training: CD-k on propagated binary activations for every
  layer but the last, which is fit to one-hot class blocks given h_{N-1}.
  Deterministic in config.seed.
*/
inline TrainResult train_layerwise(const std::vector<LabeledSample> &data,
                                   const TrainConfig &config) {
  require(!data.empty(), "train_layerwise: empty dataset");
  require(!config.layer_sizes.empty(), "train_layerwise: no layer sizes given");
  require(config.epochs >= 0 && config.batch_size >= 1 && config.cd_steps >= 1,
          "train_layerwise: epochs, batch_size and cd_steps must be positive");
  const std::size_t n_in = data.front().x.size();
  int n_classes = 0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    require(data[s].x.size() == n_in, "train_layerwise: sample " + std::to_string(s) +
                                          " has dimension " + std::to_string(data[s].x.size()) +
                                          ", expected " + std::to_string(n_in));
    require(data[s].y >= 0, "train_layerwise: negative class index");
    n_classes = std::max(n_classes, data[s].y + 1);
  }
  const int n_out = config.layer_sizes.back();
  require(n_out % n_classes == 0,
          "train_layerwise: output width " + std::to_string(n_out) +
              " is not a multiple of the class count " + std::to_string(n_classes));

  DeepStack stack;
  stack.meta.seed = config.seed;
  stack.meta.n_classes = n_classes;
  stack.meta.cd_steps = config.cd_steps;
  stack.meta.learning_rate = config.learning_rate;
  stack.meta.epochs = config.epochs;

  const int depth = static_cast<int>(config.layer_sizes.size());
  Rng init_rng(derive_seed(config.seed, "init"));
  Rng rng(derive_seed(config.seed, "train"));

  std::vector<std::size_t> order(data.size());
  for (int k = 0; k < depth; ++k) {
    const int width_in = k == 0 ? static_cast<int>(n_in) : config.layer_sizes[k - 1];
    RbmLayer layer =
        detail::init_layer(config.layer_sizes[k], width_in, config.init_scale, init_rng);
    const bool output_layer = (k == depth - 1);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      // Fresh binary activations of layer k for every sample.
      std::vector<Vector> visible(data.size());
      for (std::size_t s = 0; s < data.size(); ++s) {
        BitVector v = data[s].x;
        for (int j = 0; j < k; ++j) v = sample_layer(stack.layers[j], v, rng);
        visible[s] = detail::to_vector(v);
      }
      for (std::size_t s = 0; s < order.size(); ++s) order[s] = s;
      std::shuffle(order.begin(), order.end(), rng);

      for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        const std::size_t stop = std::min(order.size(), start + config.batch_size);
        std::vector<Vector> batch;
        std::vector<Vector> targets;
        for (std::size_t s = start; s < stop; ++s) {
          batch.push_back(visible[order[s]]);
          if (output_layer)
            targets.push_back(class_code(data[order[s]].y, layer.n_out(), n_classes));
        }
        if (output_layer)
          detail::output_update(layer, batch, targets, config.learning_rate);
        else
          detail::cd_update(layer, batch, config.cd_steps, config.learning_rate, rng);
      }
    }
    layer.validate();
    stack.layers.push_back(std::move(layer));
  }

  TrainResult result;
  result.accuracy = training_accuracy(stack, data, config.eval_chains,
                                      derive_seed(config.seed, "evaluate"));
  stack.meta.train_accuracy = result.accuracy;
  result.stack = std::move(stack);
  return result;
}

/// Architecture-matched stack at its initialization (no training steps).
inline DeepStack untrained_stack(int n_in, int n_classes, const TrainConfig &config) {
  DeepStack stack;
  stack.meta.seed = config.seed;
  stack.meta.n_classes = n_classes;
  Rng init_rng(derive_seed(config.seed, "init"));
  int width_in = n_in;
  for (int width : config.layer_sizes) {
    stack.layers.push_back(detail::init_layer(width, width_in, config.init_scale, init_rng));
    width_in = width;
  }
  return stack;
}

}  // namespace rgaudit

#endif  // RGAUDIT_RBM_HPP
