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

#ifndef SKIPGRAPH_SYNC_H_
#define SKIPGRAPH_SYNC_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skipgraph/combiner.h"
#include "skipgraph/model.h"
#include "skipgraph/topology.h"

namespace skipgraph {

enum class SyncScheme {
  kRepModelNaive,  // rmn
  kRepModelOpt,    // rmo
  kPullModelBase,  // pmb
  kPullModelOpt,   // pmo
};

enum class CombinerKind { kAverage, kGradientCombiner };

std::string_view to_string(SyncScheme s);
std::string_view to_string(CombinerKind c);
SyncScheme parse_scheme(std::string_view s);
CombinerKind parse_combiner(std::string_view s);

inline bool is_replicated(SyncScheme s) {
  return s == SyncScheme::kRepModelNaive || s == SyncScheme::kRepModelOpt;
}

// Raised when a message targets a host that has no proxy for the row, or a
// row is routed to a host that does not own its master.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr std::uint64_t kMessageHeaderBytes = 16;
inline constexpr std::uint64_t kIdBytes = 8;
inline constexpr std::uint64_t kElementBytes = 4;

enum class Phase { kReduce, kBroadcast, kMirrorExchange };

// bytes = vectors * dim * 4 + ids * 8 + 16 per non-empty message. Only
// messages between distinct hosts are counted.
struct VolumeMeter {
  std::uint64_t reduce_vectors = 0;
  std::uint64_t broadcast_vectors = 0;
  std::uint64_t id_count = 0;
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;

  void record(Phase phase, std::uint64_t vectors, std::uint64_t ids, std::size_t dim);
  std::uint64_t total_vectors() const { return reduce_vectors + broadcast_vectors; }
  VolumeMeter &operator+=(const VolumeMeter &o);
  bool operator==(const VolumeMeter &) const = default;
};

// Proxies held by one simulated host. Replicated hosts hold every row;
// pull hosts hold their master range plus the mirrors installed for the
// current round.
class HostState {
 public:
  HostState(std::size_t host, const MasterMap &masters, const Model &initial, bool replicate_all);

  std::size_t host() const { return host_; }
  std::size_t dim() const { return dim_; }
  std::size_t num_nodes() const { return num_nodes_; }
  HostRange own() const { return own_; }
  bool replicated() const { return replicated_; }

  bool has(Label l, NodeId n) const { return slot_[index_of(l)][n] >= 0; }

  float *row(Label l, NodeId n) {
    const std::int32_t s = slot_[index_of(l)][n];
    if (s < 0) missing(l, n);
    return rows_[index_of(l)].data() + static_cast<std::size_t>(s) * dim_;
  }
  const float *row(Label l, NodeId n) const {
    const std::int32_t s = slot_[index_of(l)][n];
    if (s < 0) missing(l, n);
    return rows_[index_of(l)].data() + static_cast<std::size_t>(s) * dim_;
  }

  // Allocates (zeroed) mirror rows; values arrive with the broadcast.
  void install_mirrors(const MirrorSet &mirrors);
  void drop_mirrors();
  const MirrorSet &mirrors() const { return mirrors_; }

  UpdateBitmap &bitmap() { return bitmap_; }
  const UpdateBitmap &bitmap() const { return bitmap_; }

  // Row value at the start of the round.
  const float *round_start(Label l, NodeId n) const {
    return bitmap_.test(l, n) ? bitmap_.snapshot(l, n) : row(l, n);
  }

 private:
  [[noreturn]] void missing(Label l, NodeId n) const;

  std::size_t host_;
  std::size_t dim_;
  std::size_t num_nodes_;
  HostRange own_;
  bool replicated_;
  std::vector<std::int32_t> slot_[kNumLabels];
  std::vector<float> rows_[kNumLabels];
  MirrorSet mirrors_;
  UpdateBitmap bitmap_;
};

// Compute-phase accessor: flags (and snapshots) every row it hands out.
class TrackedRows {
 public:
  explicit TrackedRows(HostState &s) : s_(s) {}
  std::size_t dim() const { return s_.dim(); }
  float *embedding(NodeId n) { return touch(Label::kEmbedding, n); }
  float *training(NodeId n) { return touch(Label::kTraining, n); }

 private:
  float *touch(Label l, NodeId n) {
    float *r = s_.row(l, n);
    s_.bitmap().flag(l, n, r);
    return r;
  }
  HostState &s_;
};

// Accessor without tracking, for racy workers once rows are pre-flagged.
class RawRows {
 public:
  explicit RawRows(HostState &s) : s_(s) {}
  std::size_t dim() const { return s_.dim(); }
  float *embedding(NodeId n) { return s_.row(Label::kEmbedding, n); }
  float *training(NodeId n) { return s_.row(Label::kTraining, n); }

 private:
  HostState &s_;
};

struct CombineConfig {
  CombinerKind kind = CombinerKind::kGradientCombiner;
  FoldOrder order = FoldOrder::kAccumulatorProjected;
};

// Rows with O above this count as orthogonal in the round statistics.
inline constexpr double kOrthogonalThreshold = 0.9;

struct ReduceOutcome {
  VolumeMeter volume;
  // Per label, per node: the master row received at least one nonzero delta.
  std::vector<std::uint8_t> updated[kNumLabels];
  std::size_t combined_rows = 0;  // rows reconciled from >= 2 deltas
  double orthogonality_sum = 0;   // GC only
  std::size_t orthogonal_rows = 0;
  std::size_t fallbacks = 0;
};

// Mirrors ship their post-compute values to the owning host (every mirror
// row under rmn, flagged rows otherwise). The owner derives deltas against
// the round-start master value, drops exactly-zero deltas, and combines the
// rest in the order [local, then remote hosts ascending]. The combined delta
// is added to the round-start value; a row whose only delta is local is left
// as computed.
ReduceOutcome reduce_phase(SyncScheme scheme, std::span<HostState> hosts, const MasterMap &masters,
                           const CombineConfig &combine);

struct Subscription {
  std::size_t host;
  Label label;
  std::vector<NodeId> nodes;
};

// Per master host, which hosts hold mirrors of which of its rows next round.
struct SubscriptionTable {
  std::vector<std::vector<Subscription>> by_master;
  VolumeMeter volume;
};

// Pull schemes only; replicated schemes return an empty table and no volume.
SubscriptionTable exchange_mirror_lists(SyncScheme scheme, std::span<const MirrorSet> next,
                                        const MasterMap &masters, std::size_t dim);

// Replicated schemes push to every other host (all rows under rmn, rows
// updated this round under rmo). Pull schemes push to the subscribers in
// `subs`, which must already have installed their mirrors.
VolumeMeter broadcast_phase(SyncScheme scheme, std::span<HostState> hosts,
                            const MasterMap &masters, const ReduceOutcome &reduced,
                            const SubscriptionTable *subs);

}  // namespace skipgraph

#endif  // SKIPGRAPH_SYNC_H_
