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

#ifndef SKIPGRAPH_CORPUS_H_
#define SKIPGRAPH_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skipgraph/rng.h"

namespace skipgraph {

using NodeId = std::uint32_t;

// Sentences (processing units) are cut at line breaks and after this many
// retained tokens, whichever comes first.
inline constexpr std::size_t kMaxSentenceLength = 10000;

inline constexpr double kNegativeExponent = 0.75;
inline constexpr std::size_t kMaxNegativeTableSize = 100'000'000;

class EmptyVocabularyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; what() carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string &message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Calls on_token for every whitespace-delimited token and on_line_end at
// every '\n'. Tokens are passed through unchanged unless lowercase is set
// (ASCII only).
void for_each_token(std::istream &in, bool lowercase,
                    const std::function<void(std::string_view)> &on_token,
                    const std::function<void()> &on_line_end);

// Retained elements of a corpus, ordered by descending frequency with ties
// broken by first appearance. Immutable once built.
class Vocabulary {
 public:
  Vocabulary() = default;

  // `entries` must already be in id order.
  static Vocabulary from_entries(std::vector<std::pair<std::string, std::uint64_t>> entries,
                                 std::uint64_t min_count);

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string &token(NodeId id) const { return tokens_[id]; }
  std::uint64_t frequency(NodeId id) const { return frequency_[id]; }
  std::span<const std::uint64_t> frequencies() const { return frequency_; }
  std::span<const std::string> tokens() const { return tokens_; }
  std::uint64_t total_words() const { return total_words_; }
  std::uint64_t min_count() const { return min_count_; }
  std::optional<NodeId> find(const std::string &token) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> frequency_;
  std::unordered_map<std::string, NodeId> index_;
  std::uint64_t total_words_ = 0;
  std::uint64_t min_count_ = 1;
};

Vocabulary build_vocabulary(std::istream &corpus, std::uint64_t min_count, bool lowercase = false);

// Uniform draws over the table follow freq^exponent.
class NegativeTable {
 public:
  NegativeTable() = default;
  NegativeTable(std::vector<NodeId> table, double exponent)
      : table_(std::move(table)), exponent_(exponent) {}

  NodeId draw(Rng &rng) const { return table_[rng.below(table_.size())]; }
  std::size_t size() const { return table_.size(); }
  double exponent() const { return exponent_; }
  std::span<const NodeId> slots() const { return table_; }
  std::vector<std::uint64_t> slot_counts(std::size_t vocab_size) const;

 private:
  std::vector<NodeId> table_;
  double exponent_ = kNegativeExponent;
};

// 1000 slots per token, capped at kMaxNegativeTableSize.
std::size_t default_negative_table_size(std::size_t vocab_size);

NegativeTable build_negative_table(const Vocabulary &vocab, double exponent, std::size_t size);

// True when the occurrence is discarded. threshold == 0 never discards.
bool should_subsample(std::uint64_t token_freq, std::uint64_t total_words, double threshold,
                      double draw);

// Ordered occurrences plus sentence boundaries. sentence_ends is ascending
// and its last entry equals occurrences.size() whenever the list is nonempty.
struct WorkList {
  std::vector<NodeId> occurrences;
  std::vector<std::size_t> sentence_ends;

  std::size_t size() const { return occurrences.size(); }
  bool empty() const { return occurrences.empty(); }
};

// Maps the corpus to ids, dropping tokens missing from the vocabulary.
WorkList load_worklist(std::istream &corpus, const Vocabulary &vocab, bool lowercase = false,
                       std::size_t max_sentence = kMaxSentenceLength);

WorkList worklist_from_ids(std::vector<NodeId> ids, std::size_t max_sentence = kMaxSentenceLength);

// Contiguous, order-preserving split; earlier chunks take the remainder.
// Sentences are clipped at chunk boundaries.
std::vector<WorkList> partition_worklist(const WorkList &worklist, std::size_t parts);

struct WalkSpec {
  std::size_t walks_per_node = 10;
  std::size_t walk_length = 40;
  std::uint64_t seed = 0;

  void validate() const;
};

// Unweighted adjacency over dense vertex indices; labels map back to the ids
// used in the input file.
struct Graph {
  std::vector<std::uint64_t> labels;
  std::vector<std::vector<std::uint32_t>> adjacency;

  std::size_t num_vertices() const { return labels.size(); }
};

// Edge list: one "src dst" pair per line, '#' lines ignored. Unless directed
// is set every edge is added in both directions. Duplicate edges collapse.
Graph read_edge_list(std::istream &in, bool directed = false);

// Walks are emitted as vertex labels, walks_per_node passes over a seeded
// shuffle of all vertices.
std::vector<std::vector<std::uint64_t>> generate_walks(const Graph &graph, const WalkSpec &spec);

void write_walks(std::ostream &out, const std::vector<std::vector<std::uint64_t>> &walks);

}  // namespace skipgraph

#endif  // SKIPGRAPH_CORPUS_H_
