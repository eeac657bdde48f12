/**
 * Copyright 2026 The skipgraph Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "skipgraph/combiner.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "harness.h"

namespace skipgraph {
namespace {

using testing::norm2;
using testing::random_vector;
using V = GradientVec;

// Frozen from tests/oracles/derive_values.py.
constexpr double kFoldOrthogonality = 25.0 / 28.0;
constexpr double kPairOrthogonality = 5.0 / 6.0;

TEST(Projection, Examples) {
  EXPECT_EQ(project_orthogonal(V{1, 0}, V{0, 1}), (V{1, 0}));
  EXPECT_EQ(project_orthogonal(V{3, 4}, V{3, 4}), (V{0, 0}));
  const V p = project_orthogonal(V{1, 0}, V{1, 1});
  EXPECT_EQ(p, (V{0.5, -0.5}));
  EXPECT_EQ(dot(p, V{1, 1}), 0.0);
}

TEST(Projection, ZeroDirectionFallsBack) {
  std::size_t fallbacks = 0;
  EXPECT_EQ(project_orthogonal(V{1, 2}, V{0, 0}, &fallbacks), (V{1, 2}));
  EXPECT_EQ(gc_pair(V{1, 2}, V{1e-16, 0}, &fallbacks), (V{1 + 1e-16, 2}));
  EXPECT_EQ(fallbacks, 2u);
}

TEST(Projection, DimensionMismatchThrows) {
  EXPECT_THROW(project_orthogonal(V{1}, V{1, 2}), std::invalid_argument);
  EXPECT_THROW(gc_pair(V{1}, V{1, 2}), std::invalid_argument);
  EXPECT_THROW(orthogonality(V{1}, V{1, 2}), std::invalid_argument);
}

TEST(GcPair, Examples) {
  EXPECT_EQ(gc_pair(V{2, -1}, V{2, -1}), (V{2, -1}));
  EXPECT_EQ(gc_pair(V{1, 0}, V{0, 3}), (V{1, 3}));
  EXPECT_EQ(gc_pair(V{1, 0}, V{1, 1}), (V{1.5, 0.5}));
}

TEST(GcFold, IdenticalGradientsCollapse) {
  for (std::size_t k = 1; k <= 8; ++k) {
    const std::vector<V> gs(k, V{0.5, -2, 4});
    const auto [v, stats] = gc_fold(gs);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(v[j], gs[0][j], 1e-15);
    EXPECT_NEAR(stats.orthogonality, 1.0 / static_cast<double>(k), 1e-12);
    EXPECT_EQ(stats.combined_count, k);
  }
}

TEST(GcFold, OrthogonalGradientsAdd) {
  const std::vector<V> gs{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}};
  const auto [v, stats] = gc_fold(gs);
  EXPECT_EQ(v, (V{1, 2, 3}));
  EXPECT_EQ(stats.orthogonality, 1.0);
}

TEST(GcFold, MatchesExactOracle) {
  const std::vector<V> gs{{1, 0}, {1, 1}, {0, 2}};
  const auto [v, stats] = gc_fold(gs);
  EXPECT_EQ(v, (V{1.5, 2}));
  EXPECT_NEAR(stats.orthogonality, kFoldOrthogonality, 1e-15);
  EXPECT_EQ(stats.zero_denominator_fallbacks, 0u);
}

TEST(GcFold, EmptyListThrows) {
  EXPECT_THROW(gc_fold({}), std::invalid_argument);
  EXPECT_THROW(average({}), std::invalid_argument);
  const std::vector<V> ragged{{1, 2}, {1}};
  EXPECT_THROW(gc_fold(ragged), std::invalid_argument);
}

TEST(GcFold, PairConsistency) {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng.below(20);
    const V a = random_vector(rng, n), b = random_vector(rng, n);
    const std::vector<V> gs{a, b};
    EXPECT_EQ(gc_fold(gs).first, gc_pair(a, b));
  }
}

TEST(GcFold, IncomingProjectedOrderSwapsRoles) {
  const std::vector<V> gs{{1, 0}, {1, 1}};
  EXPECT_EQ(gc_fold(gs, FoldOrder::kIncomingProjected).first, gc_pair(V{1, 1}, V{1, 0}));
}

TEST(GcFold, AccumulatorMatchesFreeFunction) {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(10), k = 1 + rng.below(10);
    std::vector<V> gs;
    for (std::size_t j = 0; j < k; ++j) gs.push_back(random_vector(rng, n));
    for (const FoldOrder order : {FoldOrder::kAccumulatorProjected, FoldOrder::kIncomingProjected}) {
      FoldAccumulator acc(n, order);
      acc.add(random_vector(rng, n));
      acc.reset();
      for (const V &g : gs) acc.add(g);
      const auto [v, stats] = gc_fold(gs, order);
      EXPECT_TRUE(std::equal(v.begin(), v.end(), acc.value().begin()));
      EXPECT_EQ(acc.stats().orthogonality, stats.orthogonality);
      EXPECT_EQ(acc.count(), k);
    }
  }
}

TEST(GcFold, OrthogonalityBounds) {
  Rng rng(14);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t n = 1 + rng.below(50), k = 1 + rng.below(32);
    std::vector<V> gs;
    for (std::size_t j = 0; j < k; ++j) gs.push_back(random_vector(rng, n));
    const auto stats = gc_fold(gs).second;
    EXPECT_GE(stats.orthogonality, 0.0);
    EXPECT_LE(stats.orthogonality, 1.0 + 1e-9);
  }
}

TEST(Average, Examples) {
  const V g{1, -3};
  EXPECT_EQ(average(std::vector<V>{g}), g);
  EXPECT_EQ(average(std::vector<V>{g, V{-1, 3}}), (V{0, 0}));
  EXPECT_EQ(average(std::vector<V>{{1, 0}, {0, 1}}), (V{0.5, 0.5}));
  MeanAccumulator m(2);
  m.add(V{1, 1});
  m.reset();
  m.add(V{2, 4});
  m.add(V{0, 0});
  V out(2);
  m.mean(out);
  EXPECT_EQ(out, (V{1, 2}));
}

TEST(Orthogonality, Examples) {
  EXPECT_NEAR(orthogonality(V{1, 2, 3}, V{1, 2, 3}), 0.5, 1e-15);
  EXPECT_EQ(orthogonality(V{1, 0}, V{0, 5}), 1.0);
  EXPECT_NEAR(orthogonality(V{1, 0}, V{1, 1}), kPairOrthogonality, 1e-15);
  EXPECT_EQ(orthogonality(V{0, 0}, V{0, 0}), 1.0);
}

TEST(GcPair, ProjectionProperties) {
  Rng rng(15);
  for (const std::size_t n : {2u, 8u, 200u}) {
    for (int i = 0; i < 3000; ++i) {
      const V g1 = random_vector(rng, n), g2 = random_vector(rng, n);
      const V p = project_orthogonal(g1, g2);
      EXPECT_GE(dot(g1, p), -1e-9);
      EXPECT_LE(std::sqrt(norm2(p)), std::sqrt(norm2(g1)) + 1e-9);
      EXPECT_LE(std::abs(dot(g2, p)), 1e-6 * std::sqrt(norm2(g1) * norm2(g2)));
    }
  }
}

}  // namespace
}  // namespace skipgraph
