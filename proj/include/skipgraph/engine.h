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

#ifndef SKIPGRAPH_ENGINE_H_
#define SKIPGRAPH_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "skipgraph/corpus.h"
#include "skipgraph/model.h"
#include "skipgraph/sync.h"
#include "skipgraph/topology.h"

namespace skipgraph {

enum class ComputeMode { kDeterministic, kRacy };

std::string_view to_string(ComputeMode m);
ComputeMode parse_compute_mode(std::string_view s);

// Rounds per epoch: the measured table for 1..32 hosts, round(1.5 H) otherwise.
std::size_t auto_sync_rounds(std::size_t hosts);

struct RunConfig {
  std::size_t hosts = 1;
  std::size_t sync_rounds = 0;  // 0 selects auto_sync_rounds(hosts)
  SyncScheme scheme = SyncScheme::kRepModelOpt;
  CombinerKind combiner = CombinerKind::kGradientCombiner;
  FoldOrder fold_order = FoldOrder::kAccumulatorProjected;
  ModelParams params;  // params.epochs is R
  std::uint64_t global_seed = 1;
  ComputeMode compute_mode = ComputeMode::kDeterministic;
  std::size_t threads_per_host = 1;
  // Run hosts on separate threads when more than one core is available.
  bool parallel_hosts = true;

  std::size_t rounds_per_epoch() const {
    return sync_rounds == 0 ? auto_sync_rounds(hosts) : sync_rounds;
  }
  // Throws std::invalid_argument on any conflict.
  void validate() const;
};

// Prebuilt inputs shared read-only by every host.
struct TrainingData {
  const Vocabulary &vocab;
  const WorkList &worklist;
  const NegativeTable &table;
};

struct RoundRecord {
  std::size_t epoch = 0;
  std::size_t round = 0;
  // Wall seconds, max over hosts for the per-host phases.
  double inspection_seconds = 0;
  double compute_seconds = 0;
  double communication_seconds = 0;
  std::uint64_t samples = 0;  // across hosts
  double loss_sum = 0;        // over sampled pre-update losses
  std::uint64_t loss_count = 0;
  double alpha_end = 0;  // host 0's rate at the end of the round
  std::size_t combined_rows = 0;
  double orthogonality_sum = 0;
  std::size_t orthogonal_rows = 0;
  std::size_t fallbacks = 0;
  VolumeMeter volume;

  double mean_loss() const { return loss_count ? loss_sum / static_cast<double>(loss_count) : 0; }
  double mean_orthogonality() const {
    return combined_rows ? orthogonality_sum / static_cast<double>(combined_rows) : 0;
  }
  double orthogonal_fraction() const {
    return combined_rows ? static_cast<double>(orthogonal_rows) / static_cast<double>(combined_rows)
                         : 0;
  }
};

struct RunMetrics {
  std::vector<RoundRecord> rounds;

  // Row-weighted mean O over the epoch's combined rows; 0 without any.
  double epoch_mean_orthogonality(std::size_t epoch) const;
  VolumeMeter total_volume() const;
  std::uint64_t total_samples() const;
};

struct RunResult {
  Model model;
  RunMetrics metrics;
};

// Called after every round; used for progress logging.
using RoundObserver = std::function<void(const RoundRecord &)>;

RunResult run(const RunConfig &config, const TrainingData &data,
              const RoundObserver &observer = {});

// Canonical model assembled from each host's master range.
Model snapshot_model(std::span<const HostState> hosts, const MasterMap &masters);

// Seed of racy worker `thread` inside a round stream.
inline std::uint64_t worker_seed(std::uint64_t round_seed, std::size_t thread) {
  return derive_seed(round_seed, {0x7ac1, thread});
}

}  // namespace skipgraph

#endif  // SKIPGRAPH_ENGINE_H_
