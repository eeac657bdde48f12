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

#ifndef SKIPGRAPH_EVAL_H_
#define SKIPGRAPH_EVAL_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "skipgraph/corpus.h"
#include "skipgraph/model.h"

namespace skipgraph {

enum class QuestionKind { kSemantic, kSyntactic };

struct AnalogyQuestion {
  std::string a, b, c, d;
  std::string category;
  QuestionKind kind = QuestionKind::kSemantic;
};

// ": category" lines open sections; every other non-blank line holds four
// tokens. Categories starting with "gram" are syntactic.
std::vector<AnalogyQuestion> load_questions(std::istream &in, bool lowercase = false);

// Unit-length 64-bit copies of the embedding rows (zero rows stay zero).
class NormalizedEmbeddings {
 public:
  explicit NormalizedEmbeddings(const Model &model);

  std::size_t size() const { return rows_; }
  std::size_t dim() const { return dim_; }
  const double *row(NodeId n) const { return data_.data() + static_cast<std::size_t>(n) * dim_; }

 private:
  std::size_t rows_;
  std::size_t dim_;
  std::vector<double> data_;
};

// argmax cosine to normalize(n(b) - n(a) + n(c)) over every id except a, b
// and c; ties go to the lower id. nullopt when a token is out of vocabulary.
std::optional<NodeId> answer(const NormalizedEmbeddings &emb, const Vocabulary &vocab,
                             const AnalogyQuestion &q);

struct CategoryCount {
  std::string category;
  QuestionKind kind;
  std::size_t correct = 0;
  std::size_t answered = 0;
  std::size_t skipped = 0;
};

struct AccuracyReport {
  std::size_t semantic_correct = 0, semantic_answered = 0;
  std::size_t syntactic_correct = 0, syntactic_answered = 0;
  std::size_t skipped = 0;
  std::vector<CategoryCount> categories;  // in file order

  std::size_t answered() const { return semantic_answered + syntactic_answered; }
  std::size_t correct() const { return semantic_correct + syntactic_correct; }
  // Percentages over answered questions; 0 when nothing was answered.
  double semantic() const;
  double syntactic() const;
  double total() const;
};

AccuracyReport score(const Model &model, const std::vector<AnalogyQuestion> &questions,
                     const Vocabulary &vocab);

void write_report_table(std::ostream &out, const AccuracyReport &r);
void write_report_csv(std::ostream &out, const AccuracyReport &r);

}  // namespace skipgraph

#endif  // SKIPGRAPH_EVAL_H_
