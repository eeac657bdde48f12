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

#ifndef SKIPGRAPH_MODEL_H_
#define SKIPGRAPH_MODEL_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "skipgraph/corpus.h"

namespace skipgraph {

enum class SigmoidMode { kExact, kFast };

struct ModelParams {
  std::size_t dim = 200;
  std::size_t window = 5;
  std::size_t negatives = 15;
  double alpha0 = 0.025;
  double subsample_threshold = 1e-4;
  std::size_t epochs = 16;
  SigmoidMode sigmoid = SigmoidMode::kFast;

  void validate() const;
};

// Embedding (e) and training (t) tables, row-major |V| x dim, 32-bit storage.
class Model {
 public:
  Model() = default;
  Model(std::size_t num_nodes, std::size_t dim);

  // Embedding rows uniform in [-0.5/dim, 0.5/dim], training rows zero.
  static Model initialized(std::size_t num_nodes, std::size_t dim, std::uint64_t seed);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t dim() const { return dim_; }

  float *embedding(NodeId n) { return embedding_.data() + static_cast<std::size_t>(n) * dim_; }
  float *training(NodeId n) { return training_.data() + static_cast<std::size_t>(n) * dim_; }
  const float *embedding(NodeId n) const {
    return embedding_.data() + static_cast<std::size_t>(n) * dim_;
  }
  const float *training(NodeId n) const {
    return training_.data() + static_cast<std::size_t>(n) * dim_;
  }

  std::span<float> embedding_data() { return embedding_; }
  std::span<float> training_data() { return training_; }
  std::span<const float> embedding_data() const { return embedding_; }
  std::span<const float> training_data() const { return training_; }

  bool all_finite() const;
  bool operator==(const Model &other) const = default;

 private:
  std::size_t num_nodes_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> embedding_;
  std::vector<float> training_;
};

struct Sample {
  NodeId source;
  NodeId destination;
  std::uint8_t label;

  bool operator==(const Sample &) const = default;
};

// Fast mode clamps at +-kFastSigmoidBound and returns the table edge values
// sigmoid(+-6) beyond it.
inline constexpr double kFastSigmoidBound = 6.0;
inline constexpr std::size_t kFastSigmoidTableSize = 1000;
inline constexpr double kLossEpsilon = 1e-12;

double sigmoid(double x);
float fast_sigmoid(float x);

inline float sigmoid_as(float x, SigmoidMode mode) {
  return mode == SigmoidMode::kExact ? static_cast<float>(sigmoid(x)) : fast_sigmoid(x);
}

// -log(1 - |y - sigmoid(e_src . t_dst)|), evaluated in 64-bit with exact
// sigmoid; the log argument is clamped below by kLossEpsilon.
double sample_loss(const Model &model, const Sample &s);
double sample_loss_from_score(double score, int label);

struct EdgeGradient {
  std::vector<double> embedding;  // d loss / d e_src
  std::vector<double> training;   // d loss / d t_dst
};

EdgeGradient edge_gradient(const Model &model, const Sample &s);

class LearningRateSchedule {
 public:
  LearningRateSchedule(double alpha0, double total_updates);

  static constexpr double kFloorFraction = 1e-4;

  double alpha0() const { return alpha0_; }
  double floor() const { return alpha0_ * kFloorFraction; }
  double total_updates() const { return total_; }
  double processed() const { return processed_; }

  // max(floor, alpha0 * (1 - processed / (total + 1)))
  double at(double processed) const;
  double current() const { return at(processed_); }
  void set_processed(double processed) { processed_ = processed; }

 private:
  double alpha0_;
  double total_;
  double processed_ = 0;
};

double advance_schedule(LearningRateSchedule &schedule, std::uint64_t occurrences_processed);

namespace detail {

// Eight independent partial sums in a fixed order; the reduction is part of
// the documented arithmetic and stays bit-stable across builds.
inline float dot(const float *a, const float *b, std::size_t n) {
  std::array<float, 8> lane{};
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    for (std::size_t l = 0; l < 8; ++l) lane[l] += a[j + l] * b[j + l];
  }
  for (std::size_t l = 0; j < n; ++j, ++l) lane[l] += a[j] * b[j];
  return ((lane[0] + lane[1]) + (lane[2] + lane[3])) + ((lane[4] + lane[5]) + (lane[6] + lane[7]));
}

inline void axpy(float g, const float *x, float *y, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) y[j] += g * x[j];
}

}  // namespace detail

// Every 1-in-`period` sample contributes its pre-update loss.
struct LossSampler {
  std::uint64_t period = 100;
  std::uint64_t seen = 0;
  double sum = 0;
  std::uint64_t count = 0;

  void offer(float score, float label) {
    if (seen++ % period != 0) return;
    sum += sample_loss_from_score(score, label > 0.5f ? 1 : 0);
    ++count;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

// Row access used by the edge operator. `Rows` provides
//   std::size_t dim() const;
//   float *embedding(NodeId);
//   float *training(NodeId);
class ModelRows {
 public:
  explicit ModelRows(Model &m) : model_(m) {}
  std::size_t dim() const { return model_.dim(); }
  float *embedding(NodeId n) { return model_.embedding(n); }
  float *training(NodeId n) { return model_.training(n); }

 private:
  Model &model_;
};

// One positive pair (center, context) followed by its negatives. The t rows
// are updated in place per sample; the e_center update is accumulated in
// `scratch` (dim floats) and applied once after the group.
template <class Rows>
void apply_pair_group(Rows &rows, NodeId center, NodeId context,
                      std::span<const NodeId> negatives, float alpha, SigmoidMode mode,
                      float *scratch, LossSampler *loss = nullptr) {
  const std::size_t n = rows.dim();
  float *e = rows.embedding(center);
  std::fill(scratch, scratch + n, 0.0f);
  auto step = [&](NodeId target, float label) {
    float *t = rows.training(target);
    const float f = detail::dot(e, t, n);
    if (loss) loss->offer(f, label);
    const float g = (label - sigmoid_as(f, mode)) * alpha;
    detail::axpy(g, t, scratch, n);
    detail::axpy(g, e, t, n);
  };
  step(context, 1.0f);
  for (const NodeId neg : negatives) step(neg, 0.0f);
  for (std::size_t j = 0; j < n; ++j) e[j] += scratch[j];
}

// Window form: targets[i] is paired with negatives[i*k, (i+1)*k).
void apply_edge_operator(Model &model, NodeId center, std::span<const NodeId> targets,
                         std::span<const NodeId> negatives, std::size_t k, float alpha,
                         SigmoidMode mode = SigmoidMode::kExact);

}  // namespace skipgraph

#endif  // SKIPGRAPH_MODEL_H_
