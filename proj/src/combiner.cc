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

#include <stdexcept>

namespace skipgraph {

namespace {

void check_dims(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("gradient dimension mismatch");
}

// out = g1 - c g2 (+ g2 when keep_g2). Returns true on the zero-norm fallback.
// out may alias g1 but not g2.
bool combine_into(std::span<const double> g1, std::span<const double> g2, std::span<double> out,
                  bool keep_g2) {
  const double norm2 = dot(g2, g2);
  const bool degenerate = norm2 < kZeroNormSquared;
  const double c = degenerate ? 0.0 : dot(g2, g1) / norm2;
  for (std::size_t i = 0; i < g1.size(); ++i) {
    double v = g1[i] - c * g2[i];
    if (keep_g2) v += g2[i];
    out[i] = v;
  }
  return degenerate;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

GradientVec project_orthogonal(std::span<const double> g1, std::span<const double> g2,
                               std::size_t *fallbacks) {
  check_dims(g1, g2);
  GradientVec out(g1.size());
  if (combine_into(g1, g2, out, false) && fallbacks) ++*fallbacks;
  return out;
}

GradientVec gc_pair(std::span<const double> g1, std::span<const double> g2,
                    std::size_t *fallbacks) {
  check_dims(g1, g2);
  GradientVec out(g1.size());
  if (combine_into(g1, g2, out, true) && fallbacks) ++*fallbacks;
  return out;
}

std::pair<GradientVec, CombineStats> gc_fold(std::span<const GradientVec> gs, FoldOrder order) {
  if (gs.empty()) throw std::invalid_argument("gc_fold of an empty list");
  FoldAccumulator acc(gs.front().size(), order);
  for (const auto &g : gs) acc.add(g);
  auto v = acc.value();
  return {GradientVec(v.begin(), v.end()), acc.stats()};
}

GradientVec average(std::span<const GradientVec> gs) {
  if (gs.empty()) throw std::invalid_argument("average of an empty list");
  MeanAccumulator acc(gs.front().size());
  for (const auto &g : gs) acc.add(g);
  GradientVec out(gs.front().size());
  acc.mean(out);
  return out;
}

double orthogonality(std::span<const double> g1, std::span<const double> g2) {
  check_dims(g1, g2);
  const double energy = dot(g1, g1) + dot(g2, g2);
  if (energy == 0) return 1.0;
  const GradientVec c = gc_pair(g1, g2);
  return dot(c, c) / energy;
}

FoldAccumulator::FoldAccumulator(std::size_t dim, FoldOrder order)
    : order_(order), acc_(dim, 0.0), next_(dim, 0.0) {}

void FoldAccumulator::reset() {
  std::fill(acc_.begin(), acc_.end(), 0.0);
  count_ = 0;
  input_energy_ = 0;
  fallbacks_ = 0;
}

void FoldAccumulator::add(std::span<const double> g) {
  check_dims(acc_, g);
  input_energy_ += dot(g, g);
  if (count_++ == 0) {
    std::copy(g.begin(), g.end(), acc_.begin());
    return;
  }
  bool degenerate;
  if (order_ == FoldOrder::kAccumulatorProjected) {
    degenerate = combine_into(acc_, g, acc_, true);
  } else {
    degenerate = combine_into(g, acc_, next_, true);
    acc_.swap(next_);
  }
  if (degenerate) ++fallbacks_;
}

CombineStats FoldAccumulator::stats() const {
  CombineStats s;
  s.combined_count = count_;
  s.zero_denominator_fallbacks = fallbacks_;
  s.orthogonality = input_energy_ > 0 ? dot(acc_, acc_) / input_energy_ : 1.0;
  return s;
}

void MeanAccumulator::reset() {
  std::fill(sum_.begin(), sum_.end(), 0.0);
  count_ = 0;
}

void MeanAccumulator::add(std::span<const double> g) {
  check_dims(sum_, g);
  for (std::size_t i = 0; i < g.size(); ++i) sum_[i] += g[i];
  ++count_;
}

void MeanAccumulator::mean(std::span<double> out) const {
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < sum_.size(); ++i) out[i] = count_ ? sum_[i] / n : 0.0;
}

}  // namespace skipgraph
