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

#include "skipgraph/sync.h"

#include <algorithm>

namespace skipgraph {

namespace {

constexpr Label kLabels[kNumLabels] = {Label::kEmbedding, Label::kTraining};

// A contribution to one master row: the sender's post-compute value.
struct Contribution {
  NodeId node;
  const float *value;
  bool local;
};

// Sorted ids of `nodes` that fall in `r`.
std::vector<NodeId> in_range(const std::vector<NodeId> &nodes, HostRange r) {
  auto lo = std::lower_bound(nodes.begin(), nodes.end(), r.begin);
  auto hi = std::lower_bound(lo, nodes.end(), r.end);
  return {lo, hi};
}

}  // namespace

std::string_view to_string(SyncScheme s) {
  switch (s) {
    case SyncScheme::kRepModelNaive: return "rmn";
    case SyncScheme::kRepModelOpt: return "rmo";
    case SyncScheme::kPullModelBase: return "pmb";
    case SyncScheme::kPullModelOpt: return "pmo";
  }
  return "?";
}

std::string_view to_string(CombinerKind c) {
  return c == CombinerKind::kAverage ? "avg" : "gc";
}

SyncScheme parse_scheme(std::string_view s) {
  if (s == "rmn") return SyncScheme::kRepModelNaive;
  if (s == "rmo") return SyncScheme::kRepModelOpt;
  if (s == "pmb") return SyncScheme::kPullModelBase;
  if (s == "pmo") return SyncScheme::kPullModelOpt;
  throw std::invalid_argument("unknown sync scheme '" + std::string(s) + "'");
}

CombinerKind parse_combiner(std::string_view s) {
  if (s == "avg") return CombinerKind::kAverage;
  if (s == "gc") return CombinerKind::kGradientCombiner;
  throw std::invalid_argument("unknown combiner '" + std::string(s) + "'");
}

void VolumeMeter::record(Phase phase, std::uint64_t vectors, std::uint64_t ids,
                         std::size_t dim) {
  if (vectors == 0 && ids == 0) return;
  if (phase == Phase::kReduce) reduce_vectors += vectors;
  if (phase == Phase::kBroadcast) broadcast_vectors += vectors;
  id_count += ids;
  ++messages;
  bytes += vectors * dim * kElementBytes + ids * kIdBytes + kMessageHeaderBytes;
}

VolumeMeter &VolumeMeter::operator+=(const VolumeMeter &o) {
  reduce_vectors += o.reduce_vectors;
  broadcast_vectors += o.broadcast_vectors;
  id_count += o.id_count;
  messages += o.messages;
  bytes += o.bytes;
  return *this;
}

HostState::HostState(std::size_t host, const MasterMap &masters, const Model &initial,
                     bool replicate_all)
    : host_(host),
      dim_(initial.dim()),
      num_nodes_(initial.num_nodes()),
      own_(masters.range(host)),
      replicated_(replicate_all),
      bitmap_(initial.num_nodes(), initial.dim()) {
  if (masters.num_nodes() != initial.num_nodes()) {
    throw std::invalid_argument("master map and model disagree on node count");
  }
  for (const Label l : kLabels) {
    auto &slot = slot_[index_of(l)];
    auto &rows = rows_[index_of(l)];
    slot.assign(num_nodes_, -1);
    const auto all = l == Label::kEmbedding ? initial.embedding_data() : initial.training_data();
    if (replicate_all) {
      for (std::size_t n = 0; n < num_nodes_; ++n) slot[n] = static_cast<std::int32_t>(n);
      rows.assign(all.begin(), all.end());
    } else {
      for (NodeId n = own_.begin; n < own_.end; ++n) {
        slot[n] = static_cast<std::int32_t>(n - own_.begin);
      }
      rows.assign(all.begin() + static_cast<std::ptrdiff_t>(own_.begin * dim_),
                  all.begin() + static_cast<std::ptrdiff_t>(own_.end * dim_));
    }
  }
}

void HostState::missing(Label l, NodeId n) const {
  throw ProtocolError("host " + std::to_string(host_) + " has no " +
                      (l == Label::kEmbedding ? "e" : "t") + " proxy for node " +
                      std::to_string(n));
}

void HostState::install_mirrors(const MirrorSet &mirrors) {
  if (replicated_) throw std::logic_error("replicated hosts hold every row already");
  drop_mirrors();
  for (const Label l : kLabels) {
    auto &slot = slot_[index_of(l)];
    auto &rows = rows_[index_of(l)];
    for (const NodeId n : mirrors.of(l)) {
      if (slot[n] >= 0) {
        throw ProtocolError("mirror for node " + std::to_string(n) + " already present on host " +
                            std::to_string(host_));
      }
      slot[n] = static_cast<std::int32_t>(rows.size() / dim_);
      rows.resize(rows.size() + dim_, 0.0f);
    }
  }
  mirrors_ = mirrors;
}

void HostState::drop_mirrors() {
  if (replicated_) return;
  for (const Label l : kLabels) {
    for (const NodeId n : mirrors_.of(l)) slot_[index_of(l)][n] = -1;
    rows_[index_of(l)].resize(own_.size() * dim_);
  }
  mirrors_ = MirrorSet{};
}

ReduceOutcome reduce_phase(SyncScheme scheme, std::span<HostState> hosts, const MasterMap &masters,
                           const CombineConfig &combine) {
  if (hosts.size() != masters.num_hosts()) {
    throw std::invalid_argument("host count does not match master map");
  }
  ReduceOutcome out;
  const std::size_t num_nodes = masters.num_nodes();
  const std::size_t dim = hosts.empty() ? 0 : hosts.front().dim();
  for (auto &u : out.updated) u.assign(num_nodes, 0);

  FoldAccumulator fold(dim, combine.order);
  MeanAccumulator mean(dim);
  std::vector<double> delta(dim);
  std::vector<double> combined(dim);
  std::vector<float> inbox;
  std::vector<Contribution> entries;

  for (std::size_t o = 0; o < hosts.size(); ++o) {
    HostState &owner = hosts[o];
    const HostRange range = masters.range(o);
    for (const Label l : kLabels) {
      entries.clear();
      for (const NodeId n : owner.bitmap().flagged(l)) {
        if (range.contains(n)) entries.push_back({n, owner.row(l, n), true});
      }

      // Simulated transport: every sender's rows are copied into the inbox.
      std::vector<std::pair<NodeId, std::size_t>> remote;  // node, inbox offset
      inbox.clear();
      for (std::size_t h = 0; h < hosts.size(); ++h) {
        if (h == o) continue;
        const HostState &sender = hosts[h];
        std::size_t shipped = 0;
        auto ship = [&](NodeId n) {
          if (masters.host_of(n) != o) {
            throw ProtocolError("row " + std::to_string(n) + " routed to host " +
                                std::to_string(o) + " which does not own it");
          }
          const float *v = sender.row(l, n);
          remote.emplace_back(n, inbox.size());
          inbox.insert(inbox.end(), v, v + dim);
          ++shipped;
        };
        if (scheme == SyncScheme::kRepModelNaive) {
          for (NodeId n = range.begin; n < range.end; ++n) ship(n);
        } else {
          for (const NodeId n : sender.bitmap().flagged(l)) {
            if (range.contains(n)) ship(n);
          }
        }
        const bool dense = scheme == SyncScheme::kRepModelNaive;
        out.volume.record(Phase::kReduce, shipped, dense ? 0 : shipped, dim);
      }
      for (const auto &[n, offset] : remote) entries.push_back({n, inbox.data() + offset, false});

      // Local entries were pushed first and remote ones by ascending host,
      // so a stable sort keeps the documented combine order per row.
      std::stable_sort(entries.begin(), entries.end(),
                       [](const Contribution &a, const Contribution &b) { return a.node < b.node; });

      for (std::size_t i = 0; i < entries.size();) {
        const NodeId n = entries[i].node;
        std::size_t j = i;
        while (j < entries.size() && entries[j].node == n) ++j;

        const float *start = owner.round_start(l, n);
        fold.reset();
        mean.reset();
        bool only_local = true;
        for (std::size_t k = i; k < j; ++k) {
          bool nonzero = false;
          for (std::size_t d = 0; d < dim; ++d) {
            delta[d] = static_cast<double>(entries[k].value[d]) - static_cast<double>(start[d]);
            nonzero |= delta[d] != 0.0;
          }
          if (!nonzero) continue;
          only_local &= entries[k].local;
          fold.add(delta);
          mean.add(delta);
        }
        i = j;
        const std::size_t count = fold.count();
        if (count == 0) continue;
        out.updated[index_of(l)][n] = 1;
        if (count == 1 && only_local) continue;

        if (combine.kind == CombinerKind::kGradientCombiner) {
          const auto v = fold.value();
          std::copy(v.begin(), v.end(), combined.begin());
        } else {
          mean.mean(combined);
        }
        float *row = owner.row(l, n);
        for (std::size_t d = 0; d < dim; ++d) {
          row[d] = static_cast<float>(static_cast<double>(start[d]) + combined[d]);
        }
        if (count >= 2) {
          ++out.combined_rows;
          if (combine.kind == CombinerKind::kGradientCombiner) {
            const CombineStats s = fold.stats();
            out.orthogonality_sum += s.orthogonality;
            if (s.orthogonality > kOrthogonalThreshold) ++out.orthogonal_rows;
            out.fallbacks += s.zero_denominator_fallbacks;
          }
        }
      }
    }
  }
  return out;
}

SubscriptionTable exchange_mirror_lists(SyncScheme scheme, std::span<const MirrorSet> next,
                                        const MasterMap &masters, std::size_t dim) {
  SubscriptionTable table;
  table.by_master.resize(masters.num_hosts());
  if (is_replicated(scheme)) return table;
  if (next.size() != masters.num_hosts()) {
    throw std::invalid_argument("one mirror set per host expected");
  }
  const bool label_specific = scheme == SyncScheme::kPullModelOpt;
  for (std::size_t h = 0; h < next.size(); ++h) {
    for (std::size_t o = 0; o < masters.num_hosts(); ++o) {
      if (o == h) continue;
      const HostRange r = masters.range(o);
      auto e = in_range(next[h].e_mirrors, r);
      auto t = in_range(next[h].t_mirrors, r);
      if (label_specific) {
        table.volume.record(Phase::kMirrorExchange, 0, e.size(), dim);
        table.volume.record(Phase::kMirrorExchange, 0, t.size(), dim);
      } else {
        // Label-agnostic proxies: one id list covers both labels.
        if (e != t) throw ProtocolError("label-agnostic mirror sets must match");
        table.volume.record(Phase::kMirrorExchange, 0, e.size(), dim);
      }
      if (!e.empty()) table.by_master[o].push_back({h, Label::kEmbedding, std::move(e)});
      if (!t.empty()) table.by_master[o].push_back({h, Label::kTraining, std::move(t)});
    }
  }
  return table;
}

VolumeMeter broadcast_phase(SyncScheme scheme, std::span<HostState> hosts,
                            const MasterMap &masters, const ReduceOutcome &reduced,
                            const SubscriptionTable *subs) {
  VolumeMeter volume;
  const std::size_t dim = hosts.empty() ? 0 : hosts.front().dim();
  if (is_replicated(scheme)) {
    const bool naive = scheme == SyncScheme::kRepModelNaive;
    for (std::size_t o = 0; o < hosts.size(); ++o) {
      const HostRange r = masters.range(o);
      for (const Label l : kLabels) {
        std::vector<NodeId> rows;
        for (NodeId n = r.begin; n < r.end; ++n) {
          if (naive || reduced.updated[index_of(l)][n]) rows.push_back(n);
        }
        for (std::size_t h = 0; h < hosts.size(); ++h) {
          if (h == o) continue;
          for (const NodeId n : rows) {
            const float *src = hosts[o].row(l, n);
            std::copy(src, src + dim, hosts[h].row(l, n));
          }
          volume.record(Phase::kBroadcast, rows.size(), naive ? 0 : rows.size(), dim);
        }
      }
    }
    return volume;
  }

  if (subs == nullptr) throw std::invalid_argument("pull schemes broadcast to subscribers");
  for (std::size_t o = 0; o < hosts.size(); ++o) {
    for (const Subscription &s : subs->by_master[o]) {
      if (s.host == o) throw ProtocolError("host subscribed to its own masters");
      HostState &dst = hosts[s.host];
      for (const NodeId n : s.nodes) {
        if (!dst.has(s.label, n)) {
          throw ProtocolError("broadcast of node " + std::to_string(n) + " to host " +
                              std::to_string(s.host) + " which holds no mirror for it");
        }
        const float *src = hosts[o].row(s.label, n);
        std::copy(src, src + dim, dst.row(s.label, n));
      }
      volume.record(Phase::kBroadcast, s.nodes.size(), s.nodes.size(), dim);
    }
  }
  return volume;
}

}  // namespace skipgraph
