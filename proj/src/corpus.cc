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

#include "skipgraph/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace skipgraph {

namespace {

constexpr bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

void lower_ascii(std::string &s) {
  for (char &c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string &message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

void for_each_token(std::istream &in, bool lowercase,
                    const std::function<void(std::string_view)> &on_token,
                    const std::function<void()> &on_line_end) {
  constexpr std::size_t kChunk = 1 << 20;
  std::vector<char> buffer(kChunk);
  std::string pending;
  auto flush = [&] {
    if (pending.empty()) return;
    if (lowercase) lower_ascii(pending);
    on_token(pending);
    pending.clear();
  };
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    std::size_t i = 0;
    while (i < got) {
      const char c = buffer[i];
      if (is_space(c)) {
        flush();
        if (c == '\n') on_line_end();
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < got && !is_space(buffer[j])) ++j;
      pending.append(buffer.data() + i, j - i);
      i = j;
    }
  }
  if (in.bad()) throw std::runtime_error("failed reading corpus stream");
  flush();
}

Vocabulary Vocabulary::from_entries(std::vector<std::pair<std::string, std::uint64_t>> entries,
                                    std::uint64_t min_count) {
  Vocabulary v;
  v.min_count_ = min_count;
  v.tokens_.reserve(entries.size());
  v.frequency_.reserve(entries.size());
  for (auto &[token, freq] : entries) {
    const auto id = static_cast<NodeId>(v.tokens_.size());
    if (!v.index_.emplace(token, id).second) {
      throw std::invalid_argument("duplicate vocabulary token: " + token);
    }
    v.total_words_ += freq;
    v.tokens_.push_back(std::move(token));
    v.frequency_.push_back(freq);
  }
  return v;
}

std::optional<NodeId> Vocabulary::find(const std::string &token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(std::istream &corpus, std::uint64_t min_count, bool lowercase) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");

  struct Count {
    std::uint64_t freq = 0;
    std::uint64_t first = 0;
  };
  std::unordered_map<std::string, Count> counts;
  std::uint64_t position = 0;
  for_each_token(
      corpus, lowercase,
      [&](std::string_view tok) {
        auto [it, inserted] = counts.try_emplace(std::string(tok));
        if (inserted) it->second.first = position;
        ++it->second.freq;
        ++position;
      },
      [] {});
  if (counts.empty()) throw EmptyVocabularyError("corpus contains no tokens");

  std::vector<std::pair<const std::string *, Count>> kept;
  kept.reserve(counts.size());
  for (const auto &[token, c] : counts) {
    if (c.freq >= min_count) kept.emplace_back(&token, c);
  }
  if (kept.empty()) {
    throw EmptyVocabularyError("no token reaches min_count=" + std::to_string(min_count));
  }
  std::sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
    if (a.second.freq != b.second.freq) return a.second.freq > b.second.freq;
    return a.second.first < b.second.first;
  });

  std::vector<std::pair<std::string, std::uint64_t>> entries;
  entries.reserve(kept.size());
  for (const auto &[token, c] : kept) entries.emplace_back(*token, c.freq);
  return Vocabulary::from_entries(std::move(entries), min_count);
}

std::vector<std::uint64_t> NegativeTable::slot_counts(std::size_t vocab_size) const {
  std::vector<std::uint64_t> counts(vocab_size, 0);
  for (const NodeId id : table_) ++counts.at(id);
  return counts;
}

std::size_t default_negative_table_size(std::size_t vocab_size) {
  return std::max<std::size_t>(vocab_size, std::min(kMaxNegativeTableSize, vocab_size * 1000));
}

NegativeTable build_negative_table(const Vocabulary &vocab, double exponent, std::size_t size) {
  if (!(exponent > 0)) throw std::invalid_argument("negative table exponent must be > 0");
  const std::size_t n = vocab.size();
  if (n == 0) throw EmptyVocabularyError("negative table over an empty vocabulary");
  if (size < n) throw std::invalid_argument("negative table size smaller than vocabulary");

  std::vector<double> weight(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weight[i] = std::pow(static_cast<double>(vocab.frequency(static_cast<NodeId>(i))), exponent);
    total += weight[i];
  }

  // Floor each share, then hand the leftover slots one at a time to the
  // tokens holding the fewest slots (lower id first on ties). Ids are in
  // descending frequency, so slot counts stay monotone in frequency.
  std::vector<std::size_t> slots(n);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    slots[i] = static_cast<std::size_t>(std::floor(static_cast<double>(size) * weight[i] / total));
    assigned += slots[i];
  }
  if (assigned > size) {
    // Only reachable through rounding noise on degenerate inputs.
    throw std::logic_error("negative table over-allocation");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return slots[a] < slots[b]; });
  for (std::size_t r = size - assigned, k = 0; r > 0; --r, k = (k + 1) % n) {
    ++slots[order[k]];
  }
  // Every token keeps at least one slot: borrow from the largest holder,
  // preferring the least frequent among equal holders.
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i] > 0) continue;
    std::size_t donor = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (slots[j] >= slots[donor]) donor = j;
    }
    --slots[donor];
    slots[i] = 1;
  }

  std::vector<NodeId> table;
  table.reserve(size);
  for (std::size_t i = 0; i < n; ++i) {
    table.insert(table.end(), slots[i], static_cast<NodeId>(i));
  }
  return NegativeTable(std::move(table), exponent);
}

bool should_subsample(std::uint64_t token_freq, std::uint64_t total_words, double threshold,
                      double draw) {
  if (threshold <= 0 || total_words == 0 || token_freq == 0) return false;
  const double f = static_cast<double>(token_freq) / static_cast<double>(total_words);
  const double ratio = threshold / f;
  const double discard = std::max(0.0, 1.0 - (std::sqrt(ratio) + ratio));
  return draw < discard;
}

WorkList load_worklist(std::istream &corpus, const Vocabulary &vocab, bool lowercase,
                       std::size_t max_sentence) {
  WorkList w;
  std::size_t sentence_start = 0;
  auto close_sentence = [&] {
    if (w.occurrences.size() > sentence_start) {
      w.sentence_ends.push_back(w.occurrences.size());
      sentence_start = w.occurrences.size();
    }
  };
  std::string key;
  for_each_token(
      corpus, lowercase,
      [&](std::string_view tok) {
        key.assign(tok);
        const auto id = vocab.find(key);
        if (!id) return;
        w.occurrences.push_back(*id);
        if (w.occurrences.size() - sentence_start >= max_sentence) close_sentence();
      },
      close_sentence);
  close_sentence();
  return w;
}

WorkList worklist_from_ids(std::vector<NodeId> ids, std::size_t max_sentence) {
  WorkList w;
  w.occurrences = std::move(ids);
  for (std::size_t end = max_sentence; end < w.occurrences.size(); end += max_sentence) {
    w.sentence_ends.push_back(end);
  }
  if (!w.occurrences.empty()) w.sentence_ends.push_back(w.occurrences.size());
  return w;
}

std::vector<WorkList> partition_worklist(const WorkList &worklist, std::size_t parts) {
  if (parts < 1) throw std::invalid_argument("partition count must be >= 1");
  std::vector<WorkList> out(parts);
  const std::size_t n = worklist.size();
  const std::size_t base = n / parts;
  const std::size_t extra = n % parts;
  std::size_t lo = 0;
  auto ends = worklist.sentence_ends.begin();
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t hi = lo + base + (p < extra ? 1 : 0);
    WorkList &chunk = out[p];
    chunk.occurrences.assign(worklist.occurrences.begin() + static_cast<std::ptrdiff_t>(lo),
                             worklist.occurrences.begin() + static_cast<std::ptrdiff_t>(hi));
    while (ends != worklist.sentence_ends.end() && *ends <= lo) ++ends;
    for (auto it = ends; it != worklist.sentence_ends.end() && *it < hi; ++it) {
      chunk.sentence_ends.push_back(*it - lo);
    }
    if (hi > lo) chunk.sentence_ends.push_back(hi - lo);
    lo = hi;
  }
  return out;
}

void WalkSpec::validate() const {
  if (walks_per_node < 1) throw std::invalid_argument("walks_per_node must be >= 1");
  if (walk_length < 1) throw std::invalid_argument("walk_length must be >= 1");
}

Graph read_edge_list(std::istream &in, bool directed) {
  Graph g;
  std::unordered_map<std::uint64_t, std::uint32_t> dense;
  auto vertex = [&](std::uint64_t label) {
    auto [it, inserted] = dense.try_emplace(label, static_cast<std::uint32_t>(g.labels.size()));
    if (inserted) {
      g.labels.push_back(label);
      g.adjacency.emplace_back();
    }
    return it->second;
  };
  auto parse_id = [](std::string_view field, std::size_t line) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw ParseError(line, "expected a non-negative integer vertex id, got '" +
                                 std::string(field) + "'");
    }
    return v;
  };

  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::vector<std::string_view> fields;
    std::string_view rest(text);
    while (!rest.empty()) {
      std::size_t i = 0;
      while (i < rest.size() && is_space(rest[i])) ++i;
      rest.remove_prefix(i);
      if (rest.empty()) break;
      std::size_t j = 0;
      while (j < rest.size() && !is_space(rest[j])) ++j;
      fields.push_back(rest.substr(0, j));
      rest.remove_prefix(j);
    }
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() != 2) {
      throw ParseError(line, "expected 'src dst', found " + std::to_string(fields.size()) +
                                 " fields");
    }
    const std::uint32_t src = vertex(parse_id(fields[0], line));
    const std::uint32_t dst = vertex(parse_id(fields[1], line));
    g.adjacency[src].push_back(dst);
    if (!directed && src != dst) g.adjacency[dst].push_back(src);
  }
  for (auto &nbrs : g.adjacency) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return g;
}

std::vector<std::vector<std::uint64_t>> generate_walks(const Graph &graph, const WalkSpec &spec) {
  spec.validate();
  if (graph.num_vertices() == 0) throw std::invalid_argument("graph has no vertices");

  Rng rng(spec.seed);
  std::vector<std::uint32_t> order(graph.num_vertices());
  for (std::uint32_t v = 0; v < order.size(); ++v) order[v] = v;

  std::vector<std::vector<std::uint64_t>> walks;
  walks.reserve(spec.walks_per_node * graph.num_vertices());
  for (std::size_t pass = 0; pass < spec.walks_per_node; ++pass) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    for (const std::uint32_t start : order) {
      std::vector<std::uint64_t> walk;
      walk.reserve(spec.walk_length);
      std::uint32_t v = start;
      walk.push_back(graph.labels[v]);
      while (walk.size() < spec.walk_length) {
        const auto &nbrs = graph.adjacency[v];
        if (nbrs.empty()) break;
        v = nbrs[rng.below(nbrs.size())];
        walk.push_back(graph.labels[v]);
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

void write_walks(std::ostream &out, const std::vector<std::vector<std::uint64_t>> &walks) {
  for (const auto &walk : walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) out << ' ';
      out << walk[i];
    }
    out << '\n';
  }
}

}  // namespace skipgraph
