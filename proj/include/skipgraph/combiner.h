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

#ifndef SKIPGRAPH_COMBINER_H_
#define SKIPGRAPH_COMBINER_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace skipgraph {

// Gradient-combination strategies used when reconciling per-host row
// updates: plain averaging and the Gradient Combiner (GC).
//
// GC(g1, g2) = g2 + g1 - (g2.g1 / |g2|^2) g2, i.e. g1 projected onto the
// orthogonal complement of g2, plus g2. For k inputs the fold is
//   acc = g_1;  acc = GC(acc, g_i) for i = 2..k
// so the newest gradient is kept whole and the accumulator is projected.
// All arithmetic is 64-bit.

using GradientVec = std::vector<double>;

// Below this |g2|^2 the projection is undefined; the pair falls back to
// plain addition and the fallback is counted.
inline constexpr double kZeroNormSquared = 1e-30;

struct CombineStats {
  std::size_t combined_count = 0;
  // |GC(g_1..g_k)|^2 / sum |g_i|^2; 1 when the inputs carry no energy.
  double orthogonality = 1.0;
  std::size_t zero_denominator_fallbacks = 0;
};

enum class FoldOrder {
  kAccumulatorProjected,  // default: acc takes the g1 slot
  kIncomingProjected,     // debug: the incoming gradient takes the g1 slot
};

GradientVec project_orthogonal(std::span<const double> g1, std::span<const double> g2,
                               std::size_t *fallbacks = nullptr);

GradientVec gc_pair(std::span<const double> g1, std::span<const double> g2,
                    std::size_t *fallbacks = nullptr);

std::pair<GradientVec, CombineStats> gc_fold(std::span<const GradientVec> gs,
                                             FoldOrder order = FoldOrder::kAccumulatorProjected);

GradientVec average(std::span<const GradientVec> gs);

// |g1^O + g2|^2 / (|g1|^2 + |g2|^2); both inputs zero gives 1.
double orthogonality(std::span<const double> g1, std::span<const double> g2);

double dot(std::span<const double> a, std::span<const double> b);

// Streaming form of gc_fold used on the sync path to avoid per-row
// allocation. Produces bit-identical results to gc_fold.
class FoldAccumulator {
 public:
  explicit FoldAccumulator(std::size_t dim, FoldOrder order = FoldOrder::kAccumulatorProjected);

  void reset();
  void add(std::span<const double> g);
  std::span<const double> value() const { return acc_; }
  std::size_t count() const { return count_; }
  CombineStats stats() const;

 private:
  FoldOrder order_;
  std::vector<double> acc_;
  std::vector<double> next_;
  std::size_t count_ = 0;
  double input_energy_ = 0;
  std::size_t fallbacks_ = 0;
};

// Running mean with the same streaming interface.
class MeanAccumulator {
 public:
  explicit MeanAccumulator(std::size_t dim) : sum_(dim, 0.0) {}

  void reset();
  void add(std::span<const double> g);
  std::size_t count() const { return count_; }
  // Writes the mean into out.
  void mean(std::span<double> out) const;

 private:
  std::vector<double> sum_;
  std::size_t count_ = 0;
};

}  // namespace skipgraph

#endif  // SKIPGRAPH_COMBINER_H_
