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

#include <random>

#include <gtest/gtest.h>

#include "rgaudit/operators.hpp"

namespace rgaudit {
namespace {

std::vector<std::uint8_t> bits(std::initializer_list<int> b) {
  return std::vector<std::uint8_t>(b.begin(), b.end());
}

TEST(Evaluate, SingleNodeUp) { EXPECT_EQ(evaluate(OperatorId({0}), bits({1, 0})), 1.0); }

TEST(Evaluate, PairWithOneDown) { EXPECT_EQ(evaluate(OperatorId({0, 1}), bits({1, 0})), -1.0); }

TEST(Evaluate, ParityOfZerosGivesSign) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    BitVector h(n);
    for (auto &b : h) b = rng() & 1;
    std::uint64_t mask = 0;
    while (mask == 0) mask = rng() & ((std::uint64_t{1} << n) - 1);
    const OperatorId op = OperatorId::from_mask(mask);
    int zeros = 0;
    for (int i : op.indices) zeros += h[i] == 0;
    EXPECT_EQ(evaluate(op, h), zeros % 2 ? -1.0 : 1.0);
    EXPECT_EQ(evaluate_mask(mask, bits_to_index(h)), evaluate(op, h));
  }
}

TEST(Evaluate, IndexOutOfRangeThrows) {
  EXPECT_THROW(evaluate(OperatorId({2}), bits({1, 0})), ContractError);
}

TEST(OperatorId, IdentityRejected) { EXPECT_THROW(OperatorId(std::vector<int>{}), ContractError); }

TEST(EnumerateBasis, TwoNodesFullBasis) {
  const auto b = enumerate_basis(2, 2);
  ASSERT_EQ(b.size(), 3);
  EXPECT_EQ(b[0].indices, std::vector<int>({0}));
  EXPECT_EQ(b[1].indices, std::vector<int>({1}));
  EXPECT_EQ(b[2].indices, std::vector<int>({0, 1}));
}

TEST(EnumerateBasis, Counts) {
  EXPECT_EQ(enumerate_basis(4, 1).size(), 4);
  EXPECT_EQ(enumerate_basis(4, 2).size(), 10);
  EXPECT_EQ(enumerate_basis(4, 4).size(), 15);
  EXPECT_EQ(enumerate_basis(6, 3).size(), 6 + 15 + 20);
}

TEST(EnumerateBasis, InvalidDegree) {
  EXPECT_THROW(enumerate_basis(3, 0), ContractError);
  EXPECT_THROW(enumerate_basis(3, 4), ContractError);
}

TEST(EnumerateBasis, CanonicalAndRepeatable) {
  const auto a = enumerate_basis(5, 3);
  EXPECT_NO_THROW(a.validate());
  EXPECT_TRUE(a == enumerate_basis(5, 3));
  for (int i = 1; i < a.size(); ++i) EXPECT_TRUE(a[i - 1] < a[i]);
}

TEST(Orthogonality, FullBasesUpToEightNodes) {
  for (int n = 1; n <= 8; ++n) {
    const auto basis = enumerate_basis(n, n);
    const auto masks = basis.masks();
    const int states = state_count(n);
    for (int a = 0; a < basis.size(); ++a)
      for (int b = a; b < basis.size(); ++b) {
        double sum = 0.0;
        for (int s = 0; s < states; ++s)
          sum += evaluate_mask(masks[a], s) * evaluate_mask(masks[b], s);
        EXPECT_EQ(sum / states, a == b ? 1.0 : 0.0);
      }
  }
}

TEST(Couplings, UniformIsZero) {
  const Vector p = Vector::Constant(8, 1.0 / 8.0);
  const auto g = couplings_from_distribution(p, enumerate_basis(3, 3));
  EXPECT_LT(g.values.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Couplings, SingleSpinClosedForm) {
  // p(sigma) ~ exp(0.5 sigma) means H = -0.5 sigma.
  Vector p(2);
  p << std::exp(-0.5), std::exp(0.5);
  p /= p.sum();
  const auto g = couplings_from_distribution(p, enumerate_basis(1, 1));
  EXPECT_NEAR(g.values[0], -0.5, 1e-15);
}

TEST(Couplings, RoundTripRandomThreeNodes) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Vector p(8);
    for (auto &v : p) v = 0.01 + uniform01(rng);
    p /= p.sum();
    const auto g = couplings_from_distribution(p, enumerate_basis(3, 3));
    EXPECT_LE(0.5 * (distribution_from_couplings(g) - p).cwiseAbs().sum(), 1e-10);
  }
}

TEST(Couplings, InverseOfDistributionFromCouplings) {
  Rng rng(6);
  std::normal_distribution<double> normal;
  for (int n = 1; n <= 10; ++n) {
    const auto basis = enumerate_basis(n, n);
    Vector values(basis.size());
    for (auto &v : values) v = 0.3 * normal(rng) / std::sqrt(basis.size());
    const CouplingVector g(basis, values);
    const auto back = couplings_from_distribution(distribution_from_couplings(g), basis);
    EXPECT_LE((back.values - values).cwiseAbs().maxCoeff(), 1e-10) << "n = " << n;
  }
}

TEST(Couplings, TruncatedBasisKeepsLowOrderProjection) {
  Rng rng(9);
  Vector p(16);
  for (auto &v : p) v = 0.05 + uniform01(rng);
  p /= p.sum();
  const auto full = couplings_from_distribution(p, enumerate_basis(4, 4));
  const auto low = couplings_from_distribution(p, enumerate_basis(4, 2));
  EXPECT_LT((low.values - full.values.head(low.values.size())).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Couplings, ZeroProbabilityNeedsFloor) {
  Vector p(4);
  p << 0.5, 0.5, 0.0, 0.0;
  EXPECT_THROW(couplings_from_distribution(p, enumerate_basis(2, 2), 0.0), ContractError);
  EXPECT_NO_THROW(couplings_from_distribution(p, enumerate_basis(2, 2)));
}

TEST(Couplings, DimensionMismatchThrows) {
  EXPECT_THROW(couplings_from_distribution(Vector::Constant(4, 0.25), enumerate_basis(3, 3)),
               ContractError);
}

TEST(Couplings, UnnormalizedThrows) {
  EXPECT_THROW(couplings_from_distribution(Vector::Constant(4, 0.3), enumerate_basis(2, 2)),
               ContractError);
}

}  // namespace
}  // namespace rgaudit
