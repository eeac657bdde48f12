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

#ifndef SKIPGRAPH_TOPOLOGY_H_
#define SKIPGRAPH_TOPOLOGY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "skipgraph/corpus.h"
#include "skipgraph/model.h"
#include "skipgraph/rng.h"

namespace skipgraph {

enum class Label : std::uint8_t { kEmbedding = 0, kTraining = 1 };
inline constexpr std::size_t kNumLabels = 2;
inline constexpr std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }

struct HostRange {
  NodeId begin = 0;
  NodeId end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(NodeId n) const { return n >= begin && n < end; }
  bool operator==(const HostRange &) const = default;
};

// Contiguous equal split of node ids over hosts; earlier hosts take the
// remainder.
class MasterMap {
 public:
  MasterMap(std::size_t num_nodes, std::size_t num_hosts);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_hosts() const { return num_hosts_; }
  HostRange range(std::size_t host) const;
  std::size_t host_of(NodeId node) const;

 private:
  std::size_t num_nodes_;
  std::size_t num_hosts_;
  std::size_t base_;
  std::size_t extra_;
};

MasterMap assign_masters(std::size_t num_nodes, std::size_t num_hosts);

// Seed for one (host, epoch, round) stream; inspection and compute must use
// the same value.
inline std::uint64_t round_seed(std::uint64_t global_seed, std::size_t host, std::size_t epoch,
                                std::size_t round) {
  return derive_seed(global_seed, {0x5eed, host, epoch, round});
}

// Generates the skip-gram edges of a work-list slice on the fly.
//
// Per sentence: one subsampling draw per occurrence (only when the threshold
// is positive). Then per retained center, in order: one window draw
// b ~ U[1, window], and for every context position within b of the center
// (skipping contexts equal to the center token) the positive edge followed
// by `negatives` draws from the negative table. A negative equal to the
// context is redrawn up to kNegativeRedraws times and skipped after that.
class EdgeStreamer {
 public:
  static constexpr int kNegativeRedraws = 8;

  EdgeStreamer(const Vocabulary &vocab, const NegativeTable &table, const ModelParams &params)
      : vocab_(&vocab), table_(&table), window_(params.window), negatives_(params.negatives),
        threshold_(params.subsample_threshold) {}

  std::size_t negatives_per_positive() const { return negatives_; }

  // Visitor interface:
  //   void center(std::size_t occurrences_before);  // offset within slice
  //   void group(NodeId center, NodeId context, std::span<const NodeId> negatives);
  template <class Visitor>
  void stream(const WorkList &slice, std::uint64_t seed, Visitor &&visitor) const;

 private:
  const Vocabulary *vocab_;
  const NegativeTable *table_;
  std::size_t window_;
  std::size_t negatives_;
  double threshold_;
};

// Materialized stream: samples in processing order plus group markers
// (one group per positive edge, followed by its negatives).
struct EdgeStream {
  struct Group {
    std::size_t first_sample;
    std::size_t num_samples;
    std::size_t occurrences_before;
  };
  std::vector<Sample> samples;
  std::vector<Group> groups;
};

EdgeStream stream_round_edges(const WorkList &slice, const EdgeStreamer &streamer,
                              std::uint64_t seed);

// Remote nodes whose e / t rows the round will access, sorted ascending.
struct MirrorSet {
  std::vector<NodeId> e_mirrors;
  std::vector<NodeId> t_mirrors;

  const std::vector<NodeId> &of(Label l) const {
    return l == Label::kEmbedding ? e_mirrors : t_mirrors;
  }
  bool operator==(const MirrorSet &) const = default;
};

// Replays the round's stream without touching any model. With
// label_specific false both sets receive the union of sources and
// destinations. Nodes mastered by `host` are excluded.
MirrorSet inspect_round(const WorkList &slice, const EdgeStreamer &streamer, std::uint64_t seed,
                        const MasterMap &masters, std::size_t host, bool label_specific);

// One bit per (node, label) written this round, plus the round-start copy of
// every flagged row.
class UpdateBitmap {
 public:
  UpdateBitmap(std::size_t num_nodes, std::size_t dim);

  bool test(Label l, NodeId n) const { return slot_[index_of(l)][n] >= 0; }

  // Flags the row and records `row` as its round-start value. No-op when
  // already flagged. Returns true on the first flag.
  bool flag(Label l, NodeId n, const float *row) {
    auto &slot = slot_[index_of(l)][n];
    if (slot >= 0) return false;
    auto &snap = snapshot_[index_of(l)];
    slot = static_cast<std::int32_t>(flagged_[index_of(l)].size());
    flagged_[index_of(l)].push_back(n);
    snap.insert(snap.end(), row, row + dim_);
    return true;
  }

  // Round-start value of a flagged row.
  const float *snapshot(Label l, NodeId n) const {
    return snapshot_[index_of(l)].data() +
           static_cast<std::size_t>(slot_[index_of(l)][n]) * dim_;
  }

  // Flagged nodes in first-touch order.
  std::span<const NodeId> flagged(Label l) const { return flagged_[index_of(l)]; }
  std::size_t count() const { return flagged_[0].size() + flagged_[1].size(); }

  void clear();

 private:
  std::size_t dim_;
  std::vector<std::int32_t> slot_[kNumLabels];
  std::vector<NodeId> flagged_[kNumLabels];
  std::vector<float> snapshot_[kNumLabels];
};

template <class Visitor>
void EdgeStreamer::stream(const WorkList &slice, std::uint64_t seed, Visitor &&visitor) const {
  Rng rng(seed);
  std::vector<NodeId> sentence;
  std::vector<std::size_t> position;
  std::vector<NodeId> negs;
  negs.reserve(negatives_);
  std::size_t begin = 0;
  for (const std::size_t end : slice.sentence_ends) {
    sentence.clear();
    position.clear();
    for (std::size_t i = begin; i < end; ++i) {
      const NodeId id = slice.occurrences[i];
      if (threshold_ > 0 && should_subsample(vocab_->frequency(id), vocab_->total_words(),
                                             threshold_, rng.uniform())) {
        continue;
      }
      sentence.push_back(id);
      position.push_back(i);
    }
    const std::size_t len = sentence.size();
    for (std::size_t c = 0; c < len; ++c) {
      visitor.center(position[c]);
      const NodeId center = sentence[c];
      const std::size_t b = 1 + static_cast<std::size_t>(rng.below(window_));
      const std::size_t lo = c >= b ? c - b : 0;
      const std::size_t hi = std::min(len - 1, c + b);
      for (std::size_t x = lo; x <= hi; ++x) {
        if (x == c) continue;
        const NodeId context = sentence[x];
        if (context == center) continue;
        negs.clear();
        for (std::size_t k = 0; k < negatives_; ++k) {
          for (int attempt = 0; attempt < kNegativeRedraws; ++attempt) {
            const NodeId neg = table_->draw(rng);
            if (neg != context) {
              negs.push_back(neg);
              break;
            }
          }
        }
        visitor.group(center, context, std::span<const NodeId>(negs));
      }
    }
    begin = end;
  }
}

}  // namespace skipgraph

#endif  // SKIPGRAPH_TOPOLOGY_H_
