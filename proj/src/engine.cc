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

#include "skipgraph/engine.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iterator>
#include <stdexcept>
#include <thread>

namespace skipgraph {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// A contiguous piece of a host's round slice processed by one worker.
struct Stream {
  WorkList slice;
  std::uint64_t seed;
  std::size_t offset;  // occurrences before this piece within the host slice
};

std::vector<Stream> round_streams(const WorkList &slice, std::uint64_t seed,
                                  const RunConfig &config) {
  std::vector<Stream> out;
  if (config.compute_mode == ComputeMode::kDeterministic) {
    out.push_back({slice, seed, 0});
    return out;
  }
  std::size_t offset = 0;
  auto pieces = partition_worklist(slice, config.threads_per_host);
  for (std::size_t t = 0; t < pieces.size(); ++t) {
    const std::size_t n = pieces[t].size();
    out.push_back({std::move(pieces[t]), worker_seed(seed, t), offset});
    offset += n;
  }
  return out;
}

std::vector<NodeId> merge_union(const std::vector<NodeId> &a, const std::vector<NodeId> &b) {
  std::vector<NodeId> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

template <class F>
void for_each_host(std::size_t hosts, bool parallel, F &&f) {
  if (!parallel || hosts == 1) {
    for (std::size_t h = 0; h < hosts; ++h) f(h);
    return;
  }
  std::vector<std::exception_ptr> errors(hosts);
  std::vector<std::thread> workers;
  workers.reserve(hosts);
  for (std::size_t h = 0; h < hosts; ++h) {
    workers.emplace_back([&, h] {
      try {
        f(h);
      } catch (...) {
        errors[h] = std::current_exception();
      }
    });
  }
  for (auto &w : workers) w.join();
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Learning rate view of one host: the global count at the round start plus
// local progress scaled to the whole round.
struct RateView {
  const LearningRateSchedule *schedule;
  double base;
  double scale;

  float at(std::size_t local) const {
    return static_cast<float>(schedule->at(base + static_cast<double>(local) * scale));
  }
};

template <class Rows>
struct ComputeVisitor {
  Rows &rows;
  RateView rate;
  std::size_t offset;
  SigmoidMode mode;
  float *scratch;
  LossSampler *loss;
  float alpha = 0;
  std::uint64_t samples = 0;

  void center(std::size_t before) { alpha = rate.at(offset + before); }
  void group(NodeId center, NodeId context, std::span<const NodeId> negatives) {
    apply_pair_group(rows, center, context, negatives, alpha, mode, scratch, loss);
    samples += 1 + negatives.size();
  }
};

// Flags every row a stream will write, snapshotting round-start values.
struct FlagVisitor {
  TrackedRows &rows;
  void center(std::size_t) {}
  void group(NodeId center, NodeId context, std::span<const NodeId> negatives) {
    rows.embedding(center);
    rows.training(context);
    for (const NodeId n : negatives) rows.training(n);
  }
};

struct HostRoundStats {
  double inspection_seconds = 0;
  double compute_seconds = 0;
  std::uint64_t samples = 0;
  double loss_sum = 0;
  std::uint64_t loss_count = 0;
};

HostRoundStats compute_host(HostState &host, const std::vector<Stream> &streams,
                            const EdgeStreamer &streamer, const RateView &rate,
                            const RunConfig &config) {
  HostRoundStats stats;
  const auto t0 = Clock::now();
  const std::size_t dim = host.dim();
  const SigmoidMode mode = config.params.sigmoid;
  if (config.compute_mode == ComputeMode::kDeterministic) {
    TrackedRows rows(host);
    std::vector<float> scratch(dim);
    LossSampler loss;
    for (const Stream &s : streams) {
      ComputeVisitor<TrackedRows> v{rows, rate, s.offset, mode, scratch.data(), &loss};
      streamer.stream(s.slice, s.seed, v);
      stats.samples += v.samples;
    }
    stats.loss_sum = loss.sum;
    stats.loss_count = loss.count;
  } else {
    TrackedRows tracked(host);
    for (const Stream &s : streams) streamer.stream(s.slice, s.seed, FlagVisitor{tracked});
    std::vector<LossSampler> losses(streams.size());
    std::vector<std::uint64_t> samples(streams.size(), 0);
    std::vector<std::thread> workers;
    workers.reserve(streams.size());
    for (std::size_t t = 0; t < streams.size(); ++t) {
      workers.emplace_back([&, t] {
        RawRows rows(host);
        std::vector<float> scratch(dim);
        const Stream &s = streams[t];
        ComputeVisitor<RawRows> v{rows, rate, s.offset, mode, scratch.data(), &losses[t]};
        streamer.stream(s.slice, s.seed, v);
        samples[t] = v.samples;
      });
    }
    for (auto &w : workers) w.join();
    for (std::size_t t = 0; t < streams.size(); ++t) {
      stats.samples += samples[t];
      stats.loss_sum += losses[t].sum;
      stats.loss_count += losses[t].count;
    }
  }
  stats.compute_seconds = seconds_since(t0);
  return stats;
}

MirrorSet inspect_streams(const std::vector<Stream> &streams, const EdgeStreamer &streamer,
                          const MasterMap &masters, std::size_t host, bool label_specific) {
  MirrorSet out;
  for (const Stream &s : streams) {
    MirrorSet m = inspect_round(s.slice, streamer, s.seed, masters, host, label_specific);
    out.e_mirrors = merge_union(out.e_mirrors, m.e_mirrors);
    out.t_mirrors = merge_union(out.t_mirrors, m.t_mirrors);
  }
  return out;
}

}  // namespace

std::string_view to_string(ComputeMode m) {
  return m == ComputeMode::kDeterministic ? "det" : "racy";
}

ComputeMode parse_compute_mode(std::string_view s) {
  if (s == "det") return ComputeMode::kDeterministic;
  if (s == "racy") return ComputeMode::kRacy;
  throw std::invalid_argument("unknown compute mode '" + std::string(s) + "'");
}

std::size_t auto_sync_rounds(std::size_t hosts) {
  switch (hosts) {
    case 1: return 1;
    case 2: return 3;
    case 4: return 6;
    case 8: return 12;
    case 16: return 24;
    case 32: return 48;
    default: break;
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.5 * static_cast<double>(hosts))));
}

void RunConfig::validate() const {
  params.validate();
  if (hosts < 1) throw std::invalid_argument("hosts must be >= 1");
  if (threads_per_host < 1) throw std::invalid_argument("threads_per_host must be >= 1");
  if (compute_mode == ComputeMode::kDeterministic && threads_per_host != 1) {
    throw std::invalid_argument("deterministic mode runs one worker per host");
  }
}

double RunMetrics::epoch_mean_orthogonality(std::size_t epoch) const {
  double sum = 0;
  std::size_t rows = 0;
  for (const RoundRecord &r : rounds) {
    if (r.epoch != epoch) continue;
    sum += r.orthogonality_sum;
    rows += r.combined_rows;
  }
  return rows ? sum / static_cast<double>(rows) : 0.0;
}

VolumeMeter RunMetrics::total_volume() const {
  VolumeMeter v;
  for (const RoundRecord &r : rounds) v += r.volume;
  return v;
}

std::uint64_t RunMetrics::total_samples() const {
  std::uint64_t n = 0;
  for (const RoundRecord &r : rounds) n += r.samples;
  return n;
}

Model snapshot_model(std::span<const HostState> hosts, const MasterMap &masters) {
  if (hosts.size() != masters.num_hosts()) {
    throw std::invalid_argument("host count does not match master map");
  }
  const std::size_t dim = hosts.empty() ? 0 : hosts.front().dim();
  Model m(masters.num_nodes(), dim);
  for (std::size_t h = 0; h < hosts.size(); ++h) {
    const HostRange r = masters.range(h);
    for (NodeId n = r.begin; n < r.end; ++n) {
      std::copy_n(hosts[h].row(Label::kEmbedding, n), dim, m.embedding(n));
      std::copy_n(hosts[h].row(Label::kTraining, n), dim, m.training(n));
    }
  }
  return m;
}

RunResult run(const RunConfig &config, const TrainingData &data, const RoundObserver &observer) {
  config.validate();
  const std::size_t num_hosts = config.hosts;
  const std::size_t rounds = config.rounds_per_epoch();
  const std::size_t epochs = config.params.epochs;
  const std::size_t num_nodes = data.vocab.size();
  for (const NodeId id : data.worklist.occurrences) {
    if (id >= num_nodes) throw std::invalid_argument("work-list id outside the vocabulary");
  }

  const MasterMap masters(num_nodes, num_hosts);
  const bool replicated = is_replicated(config.scheme);
  const Model initial = Model::initialized(num_nodes, config.params.dim, config.global_seed);
  std::vector<HostState> hosts;
  hosts.reserve(num_hosts);
  for (std::size_t h = 0; h < num_hosts; ++h) hosts.emplace_back(h, masters, initial, replicated);

  const EdgeStreamer streamer(data.vocab, data.table, config.params);
  // slices[h][r]: host h's share of round r, identical every epoch.
  std::vector<std::vector<WorkList>> slices;
  for (const WorkList &w : partition_worklist(data.worklist, num_hosts)) {
    slices.push_back(partition_worklist(w, rounds));
  }
  std::vector<std::size_t> round_total(rounds, 0);
  for (std::size_t r = 0; r < rounds; ++r) {
    for (std::size_t h = 0; h < num_hosts; ++h) round_total[r] += slices[h][r].size();
  }

  const double corpus_size = static_cast<double>(data.worklist.size());
  const LearningRateSchedule schedule(config.params.alpha0,
                                      static_cast<double>(epochs) * corpus_size);
  const CombineConfig combine{config.combiner, config.fold_order};
  const bool parallel = config.parallel_hosts && std::thread::hardware_concurrency() > 1;
  const bool label_specific = config.scheme == SyncScheme::kPullModelOpt;

  RunResult result;
  result.metrics.rounds.reserve(epochs * rounds);
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    double base = static_cast<double>(epoch) * corpus_size;
    for (std::size_t r = 0; r < rounds; ++r) {
      RoundRecord rec;
      rec.epoch = epoch;
      rec.round = r;

      std::vector<std::vector<Stream>> streams(num_hosts);
      std::vector<RateView> rates(num_hosts);
      for (std::size_t h = 0; h < num_hosts; ++h) {
        const WorkList &slice = slices[h][r];
        streams[h] = round_streams(slice, round_seed(config.global_seed, h, epoch, r), config);
        const double scale = slice.empty() ? 1.0
                                           : static_cast<double>(round_total[r]) /
                                                 static_cast<double>(slice.size());
        rates[h] = {&schedule, base, scale};
        hosts[h].bitmap().clear();
      }

      std::vector<HostRoundStats> stats(num_hosts);
      if (!replicated) {
        std::vector<MirrorSet> next(num_hosts);
        for_each_host(num_hosts, parallel, [&](std::size_t h) {
          const auto t0 = Clock::now();
          next[h] = inspect_streams(streams[h], streamer, masters, h, label_specific);
          hosts[h].install_mirrors(next[h]);
          stats[h].inspection_seconds = seconds_since(t0);
        });
        const auto t0 = Clock::now();
        const SubscriptionTable subs =
            exchange_mirror_lists(config.scheme, next, masters, config.params.dim);
        rec.volume += subs.volume;
        rec.volume += broadcast_phase(config.scheme, hosts, masters, ReduceOutcome{}, &subs);
        rec.communication_seconds += seconds_since(t0);
      }

      for_each_host(num_hosts, parallel, [&](std::size_t h) {
        const double inspection = stats[h].inspection_seconds;
        stats[h] = compute_host(hosts[h], streams[h], streamer, rates[h], config);
        stats[h].inspection_seconds = inspection;
      });

      const auto t0 = Clock::now();
      const ReduceOutcome reduced = reduce_phase(config.scheme, hosts, masters, combine);
      rec.volume += reduced.volume;
      if (replicated) {
        rec.volume += broadcast_phase(config.scheme, hosts, masters, reduced, nullptr);
      } else {
        for (auto &h : hosts) h.drop_mirrors();
      }
      rec.communication_seconds += seconds_since(t0);

      for (const HostRoundStats &s : stats) {
        rec.inspection_seconds = std::max(rec.inspection_seconds, s.inspection_seconds);
        rec.compute_seconds = std::max(rec.compute_seconds, s.compute_seconds);
        rec.samples += s.samples;
        rec.loss_sum += s.loss_sum;
        rec.loss_count += s.loss_count;
      }
      rec.alpha_end = rates[0].at(slices[0][r].size());
      rec.combined_rows = reduced.combined_rows;
      rec.orthogonality_sum = reduced.orthogonality_sum;
      rec.orthogonal_rows = reduced.orthogonal_rows;
      rec.fallbacks = reduced.fallbacks;
      if (observer) observer(rec);
      result.metrics.rounds.push_back(rec);
      base += static_cast<double>(round_total[r]);
    }
  }
  result.model = snapshot_model(hosts, masters);
  return result;
}

}  // namespace skipgraph
