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

#include "skipgraph/topology.h"

#include <algorithm>
#include <stdexcept>

namespace skipgraph {

MasterMap::MasterMap(std::size_t num_nodes, std::size_t num_hosts)
    : num_nodes_(num_nodes), num_hosts_(num_hosts) {
  if (num_hosts < 1) throw std::invalid_argument("num_hosts must be >= 1");
  base_ = num_nodes / num_hosts;
  extra_ = num_nodes % num_hosts;
}

HostRange MasterMap::range(std::size_t host) const {
  const std::size_t lo = host * base_ + std::min(host, extra_);
  const std::size_t hi = lo + base_ + (host < extra_ ? 1 : 0);
  return {static_cast<NodeId>(lo), static_cast<NodeId>(hi)};
}

std::size_t MasterMap::host_of(NodeId node) const {
  const std::size_t big = extra_ * (base_ + 1);
  if (node < big) return node / (base_ + 1);
  return extra_ + (node - big) / base_;
}

MasterMap assign_masters(std::size_t num_nodes, std::size_t num_hosts) {
  return MasterMap(num_nodes, num_hosts);
}

EdgeStream stream_round_edges(const WorkList &slice, const EdgeStreamer &streamer,
                              std::uint64_t seed) {
  struct Collect {
    EdgeStream &out;
    std::size_t occurrences_before = 0;
    void center(std::size_t before) { occurrences_before = before; }
    void group(NodeId center, NodeId context, std::span<const NodeId> negatives) {
      out.groups.push_back({out.samples.size(), 1 + negatives.size(), occurrences_before});
      out.samples.push_back({center, context, 1});
      for (const NodeId n : negatives) out.samples.push_back({center, n, 0});
    }
  };
  EdgeStream out;
  streamer.stream(slice, seed, Collect{out});
  return out;
}

MirrorSet inspect_round(const WorkList &slice, const EdgeStreamer &streamer, std::uint64_t seed,
                        const MasterMap &masters, std::size_t host, bool label_specific) {
  const HostRange own = masters.range(host);
  std::vector<std::uint8_t> seen_e(masters.num_nodes(), 0);
  std::vector<std::uint8_t> seen_t(masters.num_nodes(), 0);
  struct Track {
    std::vector<std::uint8_t> &e;
    std::vector<std::uint8_t> &t;
    void center(std::size_t) {}
    void group(NodeId center, NodeId context, std::span<const NodeId> negatives) {
      e[center] = 1;
      t[context] = 1;
      for (const NodeId n : negatives) t[n] = 1;
    }
  };
  streamer.stream(slice, seed, Track{seen_e, seen_t});

  MirrorSet out;
  for (NodeId n = 0; n < masters.num_nodes(); ++n) {
    if (own.contains(n)) continue;
    const bool e = seen_e[n] != 0;
    const bool t = seen_t[n] != 0;
    if (label_specific) {
      if (e) out.e_mirrors.push_back(n);
      if (t) out.t_mirrors.push_back(n);
    } else if (e || t) {
      out.e_mirrors.push_back(n);
      out.t_mirrors.push_back(n);
    }
  }
  return out;
}

UpdateBitmap::UpdateBitmap(std::size_t num_nodes, std::size_t dim) : dim_(dim) {
  for (auto &s : slot_) s.assign(num_nodes, -1);
}

void UpdateBitmap::clear() {
  for (std::size_t l = 0; l < kNumLabels; ++l) {
    for (const NodeId n : flagged_[l]) slot_[l][n] = -1;
    flagged_[l].clear();
    snapshot_[l].clear();
  }
}

}  // namespace skipgraph
