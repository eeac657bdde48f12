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

#include <gtest/gtest.h>

#include <vector>

#include "harness.h"

namespace skipgraph {
namespace {

// Hosts over a small model whose e row n starts at (n, -n) and t rows at 0.
struct World {
  MasterMap masters;
  Model initial;
  std::vector<HostState> hosts;

  World(std::size_t nodes, std::size_t num_hosts, bool replicated, std::size_t dim = 2)
      : masters(nodes, num_hosts), initial(nodes, dim) {
    for (NodeId n = 0; n < nodes; ++n) {
      for (std::size_t j = 0; j < dim; ++j) {
        initial.embedding(n)[j] = j % 2 ? -static_cast<float>(n) : static_cast<float>(n);
      }
    }
    for (std::size_t h = 0; h < num_hosts; ++h) hosts.emplace_back(h, masters, initial, replicated);
  }

  // Simulated compute write: flag the row, then add `delta`.
  void write(std::size_t host, Label l, NodeId n, std::vector<float> delta) {
    TrackedRows rows(hosts[host]);
    float *r = l == Label::kEmbedding ? rows.embedding(n) : rows.training(n);
    for (std::size_t j = 0; j < delta.size(); ++j) r[j] += delta[j];
  }

  std::vector<float> master(Label l, NodeId n) const {
    const float *r = hosts[masters.host_of(n)].row(l, n);
    return {r, r + initial.dim()};
  }
};

const CombineConfig kAvg{CombinerKind::kAverage};
const CombineConfig kGc{CombinerKind::kGradientCombiner};

TEST(Names, RoundTrip) {
  for (auto s : {SyncScheme::kRepModelNaive, SyncScheme::kRepModelOpt, SyncScheme::kPullModelBase,
                 SyncScheme::kPullModelOpt}) {
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  EXPECT_EQ(parse_combiner("avg"), CombinerKind::kAverage);
  EXPECT_EQ(parse_combiner("gc"), CombinerKind::kGradientCombiner);
  EXPECT_THROW(parse_scheme("rmx"), std::invalid_argument);
  EXPECT_THROW(parse_combiner("sum"), std::invalid_argument);
}

TEST(VolumeMeter, ByteFormula) {
  VolumeMeter v;
  v.record(Phase::kReduce, 3, 3, 10);
  v.record(Phase::kBroadcast, 2, 0, 10);
  v.record(Phase::kMirrorExchange, 0, 5, 10);
  v.record(Phase::kBroadcast, 0, 0, 10);
  EXPECT_EQ(v.reduce_vectors, 3u);
  EXPECT_EQ(v.broadcast_vectors, 2u);
  EXPECT_EQ(v.id_count, 8u);
  EXPECT_EQ(v.messages, 3u);
  EXPECT_EQ(v.bytes, 5u * 10 * 4 + 8u * 8 + 3u * 16);
}

TEST(Reduce, SingleRemoteDeltaWithAverage) {
  World w(4, 2, true);
  w.write(1, Label::kEmbedding, 0, {0.5f, 0.25f});
  const auto out = reduce_phase(SyncScheme::kRepModelOpt, w.hosts, w.masters, kAvg);
  EXPECT_EQ(w.master(Label::kEmbedding, 0), (std::vector<float>{0.5f, 0.25f}));
  EXPECT_EQ(out.updated[0][0], 1);
  EXPECT_EQ(out.volume.reduce_vectors, 1u);
  EXPECT_EQ(out.volume.id_count, 1u);
}

TEST(Reduce, EqualDeltasWithGcApplyOnce) {
  World w(4, 2, true);
  w.write(0, Label::kTraining, 1, {0.5f, -1.0f});
  w.write(1, Label::kTraining, 1, {0.5f, -1.0f});
  const auto out = reduce_phase(SyncScheme::kRepModelOpt, w.hosts, w.masters, kGc);
  EXPECT_EQ(w.master(Label::kTraining, 1), (std::vector<float>{0.5f, -1.0f}));
  EXPECT_EQ(out.combined_rows, 1u);
  EXPECT_DOUBLE_EQ(out.orthogonality_sum, 0.5);
  EXPECT_EQ(out.orthogonal_rows, 0u);
}

TEST(Reduce, OrthogonalDeltasAddUnderGcAndHalveUnderAverage) {
  for (const auto &[config, expected] :
       {std::pair{kGc, std::vector<float>{1.0f, 0.5f}},
        std::pair{kAvg, std::vector<float>{0.5f, 0.25f}}}) {
    World w(4, 3, true);
    w.write(1, Label::kTraining, 0, {1.0f, 0.0f});
    w.write(2, Label::kTraining, 0, {0.0f, 0.5f});
    const auto out = reduce_phase(SyncScheme::kRepModelOpt, w.hosts, w.masters, config);
    EXPECT_EQ(w.master(Label::kTraining, 0), expected);
    EXPECT_EQ(out.combined_rows, 1u);
  }
}

TEST(Reduce, LocalOnlyRowKeepsComputedValue) {
  World w(4, 2, false);
  w.write(0, Label::kEmbedding, 1, {0.1f, 0.2f});
  const std::vector<float> computed = w.master(Label::kEmbedding, 1);
  const auto out = reduce_phase(SyncScheme::kPullModelOpt, w.hosts, w.masters, kGc);
  EXPECT_EQ(w.master(Label::kEmbedding, 1), computed);
  EXPECT_EQ(out.updated[0][1], 1);
  EXPECT_EQ(out.combined_rows, 0u);
  EXPECT_EQ(out.volume.total_vectors(), 0u);
}

TEST(Reduce, DeltasAreTakenAgainstRoundStart) {
  // The owner moves its master in place; the remote delta is still applied
  // on top of the round-start value, combined with the local delta.
  World w(2, 2, true);
  w.write(0, Label::kTraining, 0, {1.0f, 0.0f});
  w.write(1, Label::kTraining, 0, {1.0f, 0.0f});
  reduce_phase(SyncScheme::kRepModelOpt, w.hosts, w.masters, kAvg);
  EXPECT_EQ(w.master(Label::kTraining, 0), (std::vector<float>{1.0f, 0.0f}));
}

TEST(Reduce, UnchangedFlaggedRowsCarryNoDelta) {
  World w(4, 2, true);
  w.write(1, Label::kEmbedding, 0, {0.0f, 0.0f});
  const auto out = reduce_phase(SyncScheme::kRepModelOpt, w.hosts, w.masters, kGc);
  EXPECT_EQ(out.updated[0][0], 0);
  // Shipped all the same: the bitmap flagged it.
  EXPECT_EQ(out.volume.reduce_vectors, 1u);
}

TEST(Reduce, NaiveShipsEveryRow) {
  World w(6, 3, true);
  const auto out = reduce_phase(SyncScheme::kRepModelNaive, w.hosts, w.masters, kGc);
  // Each host ships both labels of every row it does not own: 2 * 6 * (3 - 1).
  EXPECT_EQ(out.volume.reduce_vectors, 24u);
  EXPECT_EQ(out.volume.id_count, 0u);
  for (const auto &u : out.updated) {
    for (auto f : u) EXPECT_EQ(f, 0);
  }
}

TEST(Broadcast, RepModelOptWithNoUpdatesIsSilent) {
  World w(6, 3, true);
  const auto reduced = reduce_phase(SyncScheme::kRepModelOpt, w.hosts, w.masters, kGc);
  const auto v = broadcast_phase(SyncScheme::kRepModelOpt, w.hosts, w.masters, reduced, nullptr);
  EXPECT_EQ(v.total_vectors(), 0u);
  EXPECT_EQ(v.bytes, 0u);
}

TEST(Broadcast, RepModelNaiveCount) {
  World w(7, 3, true);
  const auto reduced = reduce_phase(SyncScheme::kRepModelNaive, w.hosts, w.masters, kGc);
  const auto v = broadcast_phase(SyncScheme::kRepModelNaive, w.hosts, w.masters, reduced, nullptr);
  EXPECT_EQ(v.broadcast_vectors, 2u * 7 * (3 - 1));
}

TEST(Broadcast, ReplicasAgreeAfterRound) {
  Rng rng(21);
  for (const auto scheme : {SyncScheme::kRepModelNaive, SyncScheme::kRepModelOpt}) {
    World w(12, 4, true, 3);
    for (int i = 0; i < 40; ++i) {
      const std::size_t h = rng.below(4);
      const NodeId n = static_cast<NodeId>(rng.below(12));
      const Label l = rng.below(2) ? Label::kEmbedding : Label::kTraining;
      w.write(h, l, n, {static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform()), 0.f});
    }
    const auto reduced = reduce_phase(scheme, w.hosts, w.masters, kGc);
    broadcast_phase(scheme, w.hosts, w.masters, reduced, nullptr);
    for (NodeId n = 0; n < 12; ++n) {
      for (const Label l : {Label::kEmbedding, Label::kTraining}) {
        const auto m = w.master(l, n);
        for (const auto &host : w.hosts) {
          EXPECT_TRUE(std::equal(m.begin(), m.end(), host.row(l, n)));
        }
      }
    }
  }
}

TEST(MirrorExchange, ReplicatedSchemesAreStatic) {
  const MasterMap m(4, 2);
  const std::vector<MirrorSet> next{{{2}, {2}}, {{0}, {}}};
  for (const auto s : {SyncScheme::kRepModelNaive, SyncScheme::kRepModelOpt}) {
    const auto t = exchange_mirror_lists(s, next, m, 8);
    EXPECT_EQ(t.volume, VolumeMeter{});
    for (const auto &subs : t.by_master) EXPECT_TRUE(subs.empty());
  }
}

TEST(MirrorExchange, SingleHostHasNoSubscribers) {
  const MasterMap m(4, 1);
  const auto t = exchange_mirror_lists(SyncScheme::kPullModelOpt, std::vector<MirrorSet>(1), m, 8);
  ASSERT_EQ(t.by_master.size(), 1u);
  EXPECT_TRUE(t.by_master[0].empty());
  EXPECT_EQ(t.volume.bytes, 0u);
}

TEST(MirrorExchange, RecordsSubscriptionAtOwner) {
  const MasterMap m(4, 2);
  const NodeId x = 1;  // owned by host 0
  const std::vector<MirrorSet> next{{}, {{x}, {}}};
  const auto t = exchange_mirror_lists(SyncScheme::kPullModelOpt, next, m, 8);
  ASSERT_EQ(t.by_master[0].size(), 1u);
  const Subscription &s = t.by_master[0][0];
  EXPECT_EQ(s.host, 1u);
  EXPECT_EQ(s.label, Label::kEmbedding);
  EXPECT_EQ(s.nodes, (std::vector<NodeId>{x}));
  EXPECT_TRUE(t.by_master[1].empty());
  EXPECT_EQ(t.volume.id_count, 1u);
  EXPECT_EQ(t.volume.messages, 1u);
  EXPECT_EQ(t.volume.total_vectors(), 0u);
}

TEST(Broadcast, PullOptSendsOnlyTheAccessedLabel) {
  World w(4, 2, false);
  const NodeId x = 1;
  const std::vector<MirrorSet> next{{}, {{x}, {}}};
  for (std::size_t h = 0; h < 2; ++h) w.hosts[h].install_mirrors(next[h]);
  const auto subs = exchange_mirror_lists(SyncScheme::kPullModelOpt, next, w.masters, 2);
  const auto v = broadcast_phase(SyncScheme::kPullModelOpt, w.hosts, w.masters, {}, &subs);
  EXPECT_TRUE(w.hosts[1].has(Label::kEmbedding, x));
  EXPECT_FALSE(w.hosts[1].has(Label::kTraining, x));
  EXPECT_EQ(w.hosts[1].row(Label::kEmbedding, x)[0], 1.0f);
  EXPECT_EQ(v.broadcast_vectors, 1u);
  EXPECT_THROW(w.hosts[1].row(Label::kTraining, x), ProtocolError);
}

TEST(Broadcast, PullBaseSendsBothLabelsOfTheUnion) {
  World w(4, 2, false);
  const std::vector<MirrorSet> next{{{3}, {3}}, {{0, 1}, {0, 1}}};
  for (std::size_t h = 0; h < 2; ++h) w.hosts[h].install_mirrors(next[h]);
  const auto subs = exchange_mirror_lists(SyncScheme::kPullModelBase, next, w.masters, 2);
  EXPECT_EQ(subs.volume.id_count, 3u);
  EXPECT_EQ(subs.volume.messages, 2u);
  const auto v = broadcast_phase(SyncScheme::kPullModelBase, w.hosts, w.masters, {}, &subs);
  EXPECT_EQ(v.broadcast_vectors, 6u);
  EXPECT_EQ(w.hosts[0].row(Label::kEmbedding, 3)[1], -3.0f);
}

TEST(Broadcast, MissingMirrorIsAProtocolError) {
  World w(4, 2, false);
  SubscriptionTable subs;
  subs.by_master.resize(2);
  subs.by_master[0].push_back({1, Label::kTraining, {0}});
  EXPECT_THROW(broadcast_phase(SyncScheme::kPullModelOpt, w.hosts, w.masters, {}, &subs),
               ProtocolError);
}

TEST(HostState, MirrorLifecycle) {
  World w(6, 2, false);
  HostState &h = w.hosts[1];
  EXPECT_TRUE(h.has(Label::kEmbedding, 4));
  EXPECT_FALSE(h.has(Label::kEmbedding, 0));
  EXPECT_THROW(h.install_mirrors({{4}, {}}), ProtocolError);
  h.install_mirrors({{0, 2}, {1}});
  EXPECT_TRUE(h.has(Label::kEmbedding, 2));
  EXPECT_FALSE(h.has(Label::kTraining, 2));
  EXPECT_EQ(h.row(Label::kEmbedding, 2)[0], 0.0f);
  h.drop_mirrors();
  EXPECT_FALSE(h.has(Label::kEmbedding, 2));
  EXPECT_FALSE(h.has(Label::kTraining, 1));
  EXPECT_EQ(h.row(Label::kEmbedding, 4)[0], 4.0f);
}

TEST(Reduce, NoOpRoundLeavesModelUntouched) {
  for (const auto scheme : {SyncScheme::kRepModelOpt, SyncScheme::kPullModelBase,
                            SyncScheme::kPullModelOpt}) {
    World w(5, 3, is_replicated(scheme));
    const auto out = reduce_phase(scheme, w.hosts, w.masters, kGc);
    EXPECT_EQ(out.volume.total_vectors(), 0u);
    for (NodeId n = 0; n < 5; ++n) {
      EXPECT_EQ(w.master(Label::kEmbedding, n)[0], static_cast<float>(n));
    }
  }
}

}  // namespace
}  // namespace skipgraph
