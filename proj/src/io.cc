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

#include "skipgraph/io.h"

#include <charconv>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <system_error>

namespace skipgraph {

namespace {

void append_float(std::string &out, float v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

template <class T>
bool parse_number(std::string_view s, T &out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

void write_embeddings(std::ostream &out, const Vocabulary &vocab, const Model &model,
                      Label which) {
  if (vocab.size() != model.num_nodes()) {
    throw std::invalid_argument("vocabulary and model disagree on row count");
  }
  out << model.num_nodes() << ' ' << model.dim() << '\n';
  std::string line;
  for (NodeId n = 0; n < model.num_nodes(); ++n) {
    const float *row = which == Label::kEmbedding ? model.embedding(n) : model.training(n);
    line = vocab.token(n);
    for (std::size_t j = 0; j < model.dim(); ++j) {
      line.push_back(' ');
      append_float(line, row[j]);
    }
    line.push_back('\n');
    out << line;
  }
}

LoadedEmbeddings read_embeddings(std::istream &in) {
  std::string line;
  std::size_t rows = 0, dim = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  {
    std::istringstream header(line);
    if (!(header >> rows >> dim) || dim == 0) throw ParseError(1, "expected 'rows dim'");
  }
  Model model(rows, dim);
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  entries.reserve(rows);
  for (std::size_t n = 0; n < rows; ++n) {
    const std::size_t lineno = n + 2;
    if (!std::getline(in, line)) throw ParseError(lineno, "fewer rows than the header states");
    std::string_view rest(line);
    auto next_field = [&]() {
      const auto b = rest.find_first_not_of(" \t\r");
      if (b == std::string_view::npos) return std::string_view{};
      rest.remove_prefix(b);
      const auto e = std::min(rest.find_first_of(" \t\r"), rest.size());
      const auto f = rest.substr(0, e);
      rest.remove_prefix(e);
      return f;
    };
    const auto token = next_field();
    if (token.empty()) throw ParseError(lineno, "missing token");
    float *row = model.embedding(static_cast<NodeId>(n));
    for (std::size_t j = 0; j < dim; ++j) {
      if (!parse_number(next_field(), row[j])) throw ParseError(lineno, "bad or missing value");
    }
    if (!next_field().empty()) throw ParseError(lineno, "too many values");
    entries.emplace_back(std::string(token), 0);
  }
  return {Vocabulary::from_entries(std::move(entries), 1), std::move(model)};
}

void write_vocabulary(std::ostream &out, const Vocabulary &vocab) {
  for (NodeId n = 0; n < vocab.size(); ++n) {
    out << vocab.token(n) << '\t' << vocab.frequency(n) << '\n';
  }
}

Vocabulary read_vocabulary(std::istream &in, std::uint64_t min_count) {
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    std::uint64_t freq = 0;
    if (tab == std::string::npos || tab == 0 ||
        !parse_number(std::string_view(line).substr(tab + 1), freq)) {
      throw ParseError(lineno, "expected 'token<TAB>frequency'");
    }
    entries.emplace_back(line.substr(0, tab), freq);
  }
  if (entries.empty()) throw EmptyVocabularyError("vocabulary file holds no entries");
  return Vocabulary::from_entries(std::move(entries), min_count);
}

void write_metrics_csv(std::ostream &out, const RunConfig &config, const RunMetrics &metrics) {
  out << "#v1\n";
  out << "epoch,round,scheme,combiner,hosts,inspection_s,compute_s,communication_s,samples,"
         "mean_loss,alpha,combined_rows,mean_orthogonality,orthogonal_fraction,fallbacks,"
         "reduce_vectors,broadcast_vectors,id_count,messages,bytes\n";
  std::ostringstream row;
  row.precision(9);
  for (const RoundRecord &r : metrics.rounds) {
    row.str("");
    row << r.epoch << ',' << r.round << ',' << to_string(config.scheme) << ','
        << to_string(config.combiner) << ',' << config.hosts << ',' << r.inspection_seconds << ','
        << r.compute_seconds << ',' << r.communication_seconds << ',' << r.samples << ','
        << r.mean_loss() << ',' << r.alpha_end << ',' << r.combined_rows << ','
        << r.mean_orthogonality() << ',' << r.orthogonal_fraction() << ',' << r.fallbacks << ','
        << r.volume.reduce_vectors << ',' << r.volume.broadcast_vectors << ','
        << r.volume.id_count << ',' << r.volume.messages << ',' << r.volume.bytes << '\n';
    out << row.str();
  }
}

void write_manifest(std::ostream &out, const Manifest &manifest) {
  for (const auto &[key, value] : manifest) {
    if (key.empty() || key.find_first_of("=\n") != std::string::npos ||
        value.find('\n') != std::string::npos) {
      throw std::invalid_argument("manifest entry cannot be written: " + key);
    }
    out << key << '=' << value << '\n';
  }
}

Manifest read_manifest(std::istream &in) {
  Manifest m;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError(lineno, "expected key=value");
    if (!m.emplace(line.substr(0, eq), line.substr(eq + 1)).second) {
      throw ParseError(lineno, "duplicate key '" + line.substr(0, eq) + "'");
    }
  }
  return m;
}

}  // namespace skipgraph
