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

#include <gtest/gtest.h>

#include <sstream>

#include "harness.h"

namespace skipgraph {
namespace {

TEST(Embeddings, RoundTripIsExact) {
  const testing::Corpus c = testing::make_corpus(testing::zipf_text(2000, 80, 1));
  Model m = Model::initialized(c.vocab.size(), 7, 2);
  m.embedding(0)[0] = 1e-38f;
  m.embedding(1)[3] = -123456.789f;
  std::stringstream s;
  write_embeddings(s, c.vocab, m);
  const LoadedEmbeddings got = read_embeddings(s);
  ASSERT_EQ(got.vocab.size(), c.vocab.size());
  for (NodeId n = 0; n < c.vocab.size(); ++n) {
    EXPECT_EQ(got.vocab.token(n), c.vocab.token(n));
    EXPECT_TRUE(std::equal(m.embedding(n), m.embedding(n) + 7, got.model.embedding(n)));
  }
}

TEST(Embeddings, TrainingTableExport) {
  const Vocabulary v = Vocabulary::from_entries({{"a", 2}, {"b", 1}}, 1);
  Model m(2, 2);
  m.training(1)[1] = 0.5f;
  std::stringstream s;
  write_embeddings(s, v, m, Label::kTraining);
  EXPECT_EQ(s.str(), "2 2\na 0 0\nb 0 0.5\n");
}

TEST(Embeddings, MalformedInput) {
  auto read = [](const std::string &text) {
    std::istringstream in(text);
    return read_embeddings(in);
  };
  EXPECT_THROW(read(""), ParseError);
  EXPECT_THROW(read("x y\n"), ParseError);
  EXPECT_THROW(read("2 2\na 1 2\n"), ParseError);
  EXPECT_THROW(read("1 2\na 1\n"), ParseError);
  EXPECT_THROW(read("1 2\na 1 2 3\n"), ParseError);
  EXPECT_THROW(read("1 2\na 1 zz\n"), ParseError);
  EXPECT_NO_THROW(read("1 2\na 1 2\n"));
}

TEST(Vocabulary, RoundTrip) {
  const testing::Corpus c = testing::make_corpus(testing::zipf_text(3000, 90, 2));
  std::stringstream s;
  write_vocabulary(s, c.vocab);
  const Vocabulary v = read_vocabulary(s);
  ASSERT_EQ(v.size(), c.vocab.size());
  for (NodeId n = 0; n < v.size(); ++n) {
    EXPECT_EQ(v.token(n), c.vocab.token(n));
    EXPECT_EQ(v.frequency(n), c.vocab.frequency(n));
  }
  EXPECT_EQ(v.total_words(), c.vocab.total_words());
}

TEST(Vocabulary, MalformedInput) {
  std::istringstream bad("a\t3\nb\n");
  try {
    read_vocabulary(bad);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream empty("");
  EXPECT_THROW(read_vocabulary(empty), EmptyVocabularyError);
}

TEST(Manifest, RoundTripAndErrors) {
  const Manifest m{{"seed", "7"}, {"scheme", "pmo"}, {"corpus", "/tmp/a b.txt"}};
  std::stringstream s;
  write_manifest(s, m);
  EXPECT_EQ(read_manifest(s), m);
  std::istringstream dup("a=1\na=2\n");
  EXPECT_THROW(read_manifest(dup), ParseError);
  std::istringstream noeq("# comment\nabc\n");
  EXPECT_THROW(read_manifest(noeq), ParseError);
  EXPECT_THROW(write_manifest(s, Manifest{{"k", "line\nbreak"}}), std::invalid_argument);
}

TEST(MetricsCsv, OneRowPerRound) {
  const testing::Corpus c = testing::make_corpus(testing::zipf_text(3000, 100, 3));
  RunConfig cfg;
  cfg.hosts = 2;
  cfg.sync_rounds = 2;
  cfg.params.dim = 8;
  cfg.params.epochs = 2;
  const RunResult r = run(cfg, c.data());
  std::ostringstream out;
  write_metrics_csv(out, cfg, r.metrics);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "#v1");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("epoch,round,scheme,combiner,hosts,", 0), 0u);
  const auto columns = std::count(line.begin(), line.end(), ',');
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), columns);
    ++rows;
  }
  EXPECT_EQ(rows, 4u);
}

}  // namespace
}  // namespace skipgraph
