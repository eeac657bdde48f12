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

#include "skipgraph/model.h"

#include <stdexcept>

namespace skipgraph {

namespace {

struct FastSigmoidTable {
  // Entry i holds sigmoid at -bound + i * (2 * bound / size), i in [0, size].
  std::array<float, kFastSigmoidTableSize + 1> values{};

  FastSigmoidTable() {
    for (std::size_t i = 0; i <= kFastSigmoidTableSize; ++i) {
      const double x = -kFastSigmoidBound + 2.0 * kFastSigmoidBound * static_cast<double>(i) /
                                                static_cast<double>(kFastSigmoidTableSize);
      values[i] = static_cast<float>(sigmoid(x));
    }
  }
};

const FastSigmoidTable &fast_table() {
  static const FastSigmoidTable table;
  return table;
}

}  // namespace

void ModelParams::validate() const {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (!(alpha0 > 0)) throw std::invalid_argument("alpha must be > 0");
  if (subsample_threshold < 0) throw std::invalid_argument("threshold must be >= 0");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
}

Model::Model(std::size_t num_nodes, std::size_t dim)
    : num_nodes_(num_nodes),
      dim_(dim),
      embedding_(num_nodes * dim, 0.0f),
      training_(num_nodes * dim, 0.0f) {}

Model Model::initialized(std::size_t num_nodes, std::size_t dim, std::uint64_t seed) {
  Model m(num_nodes, dim);
  Rng rng(derive_seed(seed, {0x1417}));
  const double scale = 1.0 / static_cast<double>(dim);
  for (float &v : m.embedding_) v = static_cast<float>((rng.uniform() - 0.5) * scale);
  return m;
}

bool Model::all_finite() const {
  auto finite = [](float v) { return std::isfinite(v); };
  return std::all_of(embedding_.begin(), embedding_.end(), finite) &&
         std::all_of(training_.begin(), training_.end(), finite);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

float fast_sigmoid(float x) {
  const auto &t = fast_table().values;
  if (x >= kFastSigmoidBound) return t.back();
  if (x <= -kFastSigmoidBound) return t.front();
  const auto i = static_cast<std::size_t>((x + kFastSigmoidBound) *
                                          (kFastSigmoidTableSize / (2.0 * kFastSigmoidBound)));
  return t[std::min(i, kFastSigmoidTableSize)];
}

double sample_loss_from_score(double score, int label) {
  const double p = sigmoid(score);
  const double arg = 1.0 - std::abs(static_cast<double>(label) - p);
  return -std::log(std::max(arg, kLossEpsilon));
}

double sample_loss(const Model &model, const Sample &s) {
  const float *e = model.embedding(s.source);
  const float *t = model.training(s.destination);
  double score = 0;
  for (std::size_t j = 0; j < model.dim(); ++j) {
    score += static_cast<double>(e[j]) * static_cast<double>(t[j]);
  }
  return sample_loss_from_score(score, s.label);
}

EdgeGradient edge_gradient(const Model &model, const Sample &s) {
  const std::size_t n = model.dim();
  const float *e = model.embedding(s.source);
  const float *t = model.training(s.destination);
  double score = 0;
  for (std::size_t j = 0; j < n; ++j) {
    score += static_cast<double>(e[j]) * static_cast<double>(t[j]);
  }
  const double g = sigmoid(score) - static_cast<double>(s.label);
  EdgeGradient out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.embedding[j] = g * t[j];
    out.training[j] = g * e[j];
  }
  return out;
}

LearningRateSchedule::LearningRateSchedule(double alpha0, double total_updates)
    : alpha0_(alpha0), total_(total_updates) {
  if (!(alpha0 > 0)) throw std::invalid_argument("alpha0 must be > 0");
  if (total_updates < 0) throw std::invalid_argument("total_updates must be >= 0");
}

double LearningRateSchedule::at(double processed) const {
  return std::max(floor(), alpha0_ * (1.0 - processed / (total_ + 1.0)));
}

double advance_schedule(LearningRateSchedule &schedule, std::uint64_t occurrences_processed) {
  schedule.set_processed(static_cast<double>(occurrences_processed));
  return schedule.current();
}

void apply_edge_operator(Model &model, NodeId center, std::span<const NodeId> targets,
                         std::span<const NodeId> negatives, std::size_t k, float alpha,
                         SigmoidMode mode) {
  if (negatives.size() != targets.size() * k) {
    throw std::invalid_argument("expected k negatives per target");
  }
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be > 0");
  std::vector<float> scratch(model.dim());
  ModelRows rows(model);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    apply_pair_group(rows, center, targets[i], negatives.subspan(i * k, k), alpha, mode,
                     scratch.data());
  }
}

}  // namespace skipgraph
