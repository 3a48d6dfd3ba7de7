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

#include <gtest/gtest.h>

#include "rgaudit/exact.hpp"
#include "rgaudit/rbm.hpp"
#include "rgaudit/task.hpp"

namespace rgaudit {
namespace {

RbmLayer layer_of(std::initializer_list<std::initializer_list<double>> w,
                  std::initializer_list<double> a) {
  Matrix m(w.size(), w.begin()->size());
  int r = 0;
  for (const auto &row : w) {
    int c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  Vector av(a.size());
  int j = 0;
  for (double v : a) av[j++] = v;
  return RbmLayer(m, av, Vector::Zero(m.cols()));
}

TEST(RbmLayer, InconsistentShapesRejected) {
  EXPECT_THROW(RbmLayer(Matrix::Zero(2, 3), Vector::Zero(3), Vector::Zero(3)), ContractError);
  EXPECT_THROW(RbmLayer(Matrix::Zero(2, 3), Vector::Zero(2), Vector::Zero(2)), ContractError);
  Matrix w = Matrix::Zero(1, 1);
  w(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(RbmLayer(w, Vector::Zero(1), Vector::Zero(1)), ContractError);
}

TEST(DeepStack, MismatchedLayersRejected) {
  DeepStack s;
  s.layers.emplace_back(3, 2);
  s.layers.emplace_back(2, 4);
  EXPECT_THROW(s.validate(), ContractError);
  EXPECT_THROW(DeepStack{}.validate(), ContractError);
}

TEST(InputPoint, OutsideUnitBoxRejected) {
  Vector x(2);
  x << 0.5, 1.2;
  EXPECT_THROW(InputPoint{x}, ContractError);
}

TEST(HiddenGivenVisible, ZeroWeightsGiveHalf) {
  const RbmLayer l(3, 4);
  const Vector p = hidden_given_visible(l, Vector::Constant(4, 0.7));
  for (int j = 0; j < 3; ++j) EXPECT_EQ(p[j], 0.5);
}

TEST(HiddenGivenVisible, SingleUnitLogistic) {
  const RbmLayer l = layer_of({{2.0}}, {-1.0});
  EXPECT_NEAR(hidden_given_visible(l, Vector::Ones(1))[0], 0.7310585786300049, 1e-15);
}

TEST(HiddenGivenVisible, DimensionMismatchThrows) {
  EXPECT_THROW(hidden_given_visible(RbmLayer(2, 3), Vector::Zero(2)), ContractError);
}

TEST(HiddenGivenVisible, MatchesConditionalOfEnumeratedJoint) {
  // Joint exp(h.W.v + a.h + b.v) over all (h, v); p(h_j = 1 | v) by summation.
  Matrix w(2, 2);
  w << 0.31, -0.42, 0.17, 0.26;
  Vector a(2), b(2);
  a << -0.12, 0.08;
  b << 0.21, -0.33;
  const RbmLayer l(w, a, b);
  for (int v = 0; v < 4; ++v) {
    Vector vv(2);
    vv << (v & 1), (v >> 1) & 1;
    Vector marginal = Vector::Zero(2);
    double z = 0.0;
    for (int h = 0; h < 4; ++h) {
      Vector hh(2);
      hh << (h & 1), (h >> 1) & 1;
      const double e = std::exp(hh.dot(w * vv) + a.dot(hh) + b.dot(vv));
      z += e;
      marginal += e * hh;
    }
    marginal /= z;
    EXPECT_LT((hidden_given_visible(l, vv) - marginal).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(SampleLayer, SameSeedSameBits) {
  const RbmLayer l(16, 3);
  Rng r1(42), r2(42);
  EXPECT_EQ(sample_layer(l, BitVector{1, 0, 1}, r1), sample_layer(l, BitVector{1, 0, 1}, r2));
}

TEST(SampleLayer, SaturatedFieldsAreDeterministic) {
  const RbmLayer l = layer_of({{40.0, 0.0}, {0.0, -40.0}}, {-5.0, 5.0});
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_layer(l, BitVector{1, 1}, rng), BitVector({1, 0}));
    EXPECT_EQ(sample_layer(l, BitVector{0, 0}, rng), BitVector({0, 1}));
  }
}

TEST(SampleLayer, FrequenciesWithinThreeSigma) {
  const RbmLayer l = layer_of({{0.8, -1.3}, {0.4, 0.2}, {-2.0, 1.0}}, {0.1, -0.6, 0.3});
  const BitVector v{1, 0};
  const Vector p = hidden_given_visible(l, std::span<const std::uint8_t>(v));
  Rng rng(123);
  const int n = 100000;
  Vector counts = Vector::Zero(3);
  for (int i = 0; i < n; ++i) {
    const auto h = sample_layer(l, v, rng);
    for (int j = 0; j < 3; ++j) counts[j] += h[j];
  }
  for (int j = 0; j < 3; ++j)
    EXPECT_LE(std::abs(counts[j] / n - p[j]), 3.0 * std::sqrt(p[j] * (1 - p[j]) / n));
}

TEST(SampleLayer, NonBinaryVisibleRejected) {
  Rng rng(1);
  EXPECT_THROW(sample_layer(RbmLayer(2, 2), BitVector{2, 0}, rng), ContractError);
}

DeepStack small_stack() {
  DeepStack s;
  s.layers.push_back(layer_of({{0.9, -0.5, 0.3}, {-0.4, 1.1, 0.2}}, {0.1, -0.3}));
  s.layers.push_back(layer_of({{1.4, -0.8}, {0.6, 0.9}, {-1.0, 0.5}}, {-0.2, 0.1, 0.4}));
  return s;
}

InputPoint small_input() {
  Vector x(3);
  x << 0.2, 0.7, 0.5;
  return InputPoint(x);
}

TEST(Propagate, ZeroWeightsGiveFairBits) {
  DeepStack s;
  s.layers.emplace_back(4, 2);
  const auto e = propagate(s, InputPoint(Vector::Constant(2, 0.3)), 100000, 7);
  for (int j = 0; j < 4; ++j) {
    double ones = 0.0;
    for (std::size_t c = 0; c < e[0].size(); ++c) ones += e[0].sample(c)[j];
    EXPECT_NEAR(ones / 100000.0, 0.5, 3.0 * 0.5 / std::sqrt(100000.0));
  }
}

TEST(Propagate, EnsembleShapesAndPairing) {
  const auto e = propagate(small_stack(), small_input(), 500, 3);
  ASSERT_EQ(e.size(), 2u);
  for (const auto &layer : e) EXPECT_EQ(layer.size(), 500u);
  EXPECT_EQ(e[0].dimension, 2);
  EXPECT_EQ(e[1].dimension, 3);
  EXPECT_TRUE(e[0].paired_previous.empty());
  for (std::size_t c = 0; c < 500; ++c) {
    const auto parent = e[0].sample(c);
    const auto paired = e[1].previous(c);
    EXPECT_TRUE(std::equal(parent.begin(), parent.end(), paired.begin()));
    EXPECT_EQ(e[1].chain_ids[c], static_cast<std::int64_t>(c));
  }
}

TEST(Propagate, SameSeedSameEnsembles) {
  const auto a = propagate(small_stack(), small_input(), 1000, 99);
  const auto b = propagate(small_stack(), small_input(), 1000, 99);
  const auto c = propagate(small_stack(), small_input(), 1000, 100);
  EXPECT_EQ(a[1].samples, b[1].samples);
  EXPECT_NE(a[1].samples, c[1].samples);
}

TEST(Propagate, MatchesExactDistributionWithinThreeSigma) {
  const int n = 200000;
  const auto e = propagate(small_stack(), small_input(), n, 11);
  const auto q = exact_layer_distribution(small_stack(), small_input(), 2);
  Vector counts = Vector::Zero(q.probabilities.size());
  for (std::size_t c = 0; c < e[1].size(); ++c) {
    const auto s = e[1].sample(c);
    counts[static_cast<Eigen::Index>(bits_to_index(BitVector(s.begin(), s.end())))] += 1.0;
  }
  for (Eigen::Index s = 0; s < counts.size(); ++s) {
    const double p = q.probabilities[s];
    EXPECT_LE(std::abs(counts[s] / n - p), 3.0 * std::sqrt(p * (1 - p) / n)) << "state " << s;
  }
}

TEST(Propagate, TotalVariationBelowTwoPercentOnEightNodes) {
  Rng rng(4);
  std::normal_distribution<double> normal(0.0, 0.7);
  DeepStack s;
  s.layers.emplace_back(8, 4);
  s.layers.emplace_back(8, 8);
  for (auto &l : s.layers) {
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) l.weights.data()[i] = normal(rng);
    for (auto &v : l.hidden_bias) v = normal(rng);
  }
  const InputPoint x(Vector::Constant(4, 0.5));
  const auto e = propagate(s, x, 100000, 5);
  for (int k = 1; k <= 2; ++k) {
    const auto q = exact_layer_distribution(s, x, k);
    Vector emp = Vector::Zero(q.probabilities.size());
    for (std::size_t c = 0; c < e[k - 1].size(); ++c) {
      const auto b = e[k - 1].sample(c);
      emp[static_cast<Eigen::Index>(bits_to_index(BitVector(b.begin(), b.end())))] += 1e-5;
    }
    EXPECT_LE(0.5 * (emp - q.probabilities).cwiseAbs().sum(), 0.02) << "layer " << k;
  }
}

TEST(Propagate, InputDimensionMismatchThrows) {
  EXPECT_THROW(propagate(small_stack(), InputPoint(Vector::Zero(2)), 10, 1), ContractError);
  EXPECT_THROW(propagate(small_stack(), small_input(), 0, 1), ContractError);
}

TEST(ClassReadout, BlocksAndTies) {
  Vector m(4);
  m << 0.9, 0.7, 0.1, 0.3;
  const Vector means = class_block_means(m, 2);
  EXPECT_DOUBLE_EQ(means[0], 0.8);
  EXPECT_DOUBLE_EQ(means[1], 0.2);
  EXPECT_EQ(argmax_class(means), 0);
  EXPECT_EQ(argmax_class(Vector::Constant(3, 0.5)), 0);
  EXPECT_THROW(class_block_means(Vector::Zero(3), 2), ContractError);
}

TEST(Train, DegenerateSingleClass) {
  std::vector<LabeledSample> data(20, LabeledSample{{1, 0, 1, 1}, 0});
  TrainConfig c;
  c.layer_sizes = {3, 2};
  c.epochs = 5;
  const auto r = train_layerwise(data, c);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.stack.meta.n_classes, 1);
}

TEST(Train, SeparatedPrototypesReachNinetyFivePercent) {
  const TaskSpec task = make_task(8, 2, 0.05, 3);
  const auto data = gen_data(task, 500);
  TrainConfig c;
  c.layer_sizes = {6, 2};
  c.epochs = 20;
  const auto r = train_layerwise(data, c);
  EXPECT_GE(r.accuracy, 0.95);
  EXPECT_EQ(r.stack.meta.train_accuracy, r.accuracy);
}

TEST(Train, DeterministicGivenSeed) {
  const auto data = gen_data(make_task(6, 2, 0.1, 1), 100);
  TrainConfig c;
  c.layer_sizes = {4, 2};
  c.epochs = 3;
  const auto a = train_layerwise(data, c).stack;
  const auto b = train_layerwise(data, c).stack;
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(a.layers[k].weights, b.layers[k].weights);
    EXPECT_EQ(a.layers[k].hidden_bias, b.layers[k].hidden_bias);
  }
}

TEST(Train, BadInputsRejected) {
  TrainConfig c;
  c.layer_sizes = {2};
  EXPECT_THROW(train_layerwise({}, c), ContractError);
  std::vector<LabeledSample> ragged = {{{1, 0}, 0}, {{1, 0, 1}, 1}};
  EXPECT_THROW(train_layerwise(ragged, c), ContractError);
  std::vector<LabeledSample> three = {{{1, 0}, 0}, {{0, 1}, 2}};
  EXPECT_THROW(train_layerwise(three, c), ContractError);  // 2 outputs, 3 classes
}

}  // namespace
}  // namespace rgaudit
