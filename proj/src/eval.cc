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

#include "skipgraph/eval.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

namespace skipgraph {

namespace {

std::string lowered(std::string s) {
  for (char &ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

double percent(std::size_t correct, std::size_t answered) {
  return answered ? 100.0 * static_cast<double>(correct) / static_cast<double>(answered) : 0.0;
}

}  // namespace

std::vector<AnalogyQuestion> load_questions(std::istream &in, bool lowercase) {
  std::vector<AnalogyQuestion> out;
  std::string line;
  std::string category;
  bool have_category = false;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first == ":") {
      if (!(fields >> category)) throw ParseError(lineno, "category header without a name");
      have_category = true;
      continue;
    }
    if (!have_category) throw ParseError(lineno, "question before any category header");
    AnalogyQuestion q;
    q.a = first;
    std::string extra;
    if (!(fields >> q.b >> q.c >> q.d) || (fields >> extra)) {
      throw ParseError(lineno, "expected four tokens");
    }
    if (lowercase) {
      q.a = lowered(q.a);
      q.b = lowered(q.b);
      q.c = lowered(q.c);
      q.d = lowered(q.d);
    }
    q.category = category;
    q.kind = category.rfind("gram", 0) == 0 ? QuestionKind::kSyntactic : QuestionKind::kSemantic;
    out.push_back(std::move(q));
  }
  return out;
}

NormalizedEmbeddings::NormalizedEmbeddings(const Model &model)
    : rows_(model.num_nodes()), dim_(model.dim()), data_(rows_ * dim_) {
  for (std::size_t n = 0; n < rows_; ++n) {
    const float *src = model.embedding(static_cast<NodeId>(n));
    double *dst = data_.data() + n * dim_;
    double norm = 0;
    for (std::size_t j = 0; j < dim_; ++j) {
      dst[j] = src[j];
      norm += dst[j] * dst[j];
    }
    norm = std::sqrt(norm);
    if (norm > 0) {
      for (std::size_t j = 0; j < dim_; ++j) dst[j] /= norm;
    }
  }
}

std::optional<NodeId> answer(const NormalizedEmbeddings &emb, const Vocabulary &vocab,
                             const AnalogyQuestion &q) {
  const auto a = vocab.find(q.a);
  const auto b = vocab.find(q.b);
  const auto c = vocab.find(q.c);
  if (!a || !b || !c) return std::nullopt;
  const std::size_t dim = emb.dim();
  std::vector<double> target(dim);
  double norm = 0;
  for (std::size_t j = 0; j < dim; ++j) {
    target[j] = emb.row(*b)[j] - emb.row(*a)[j] + emb.row(*c)[j];
    norm += target[j] * target[j];
  }
  norm = std::sqrt(norm);
  if (norm > 0) {
    for (double &v : target) v /= norm;
  }
  std::optional<NodeId> best;
  double best_score = 0;
  for (NodeId n = 0; n < emb.size(); ++n) {
    if (n == *a || n == *b || n == *c) continue;
    const double *row = emb.row(n);
    double s = 0;
    for (std::size_t j = 0; j < dim; ++j) s += row[j] * target[j];
    if (!best || s > best_score) {
      best = n;
      best_score = s;
    }
  }
  return best;
}

double AccuracyReport::semantic() const { return percent(semantic_correct, semantic_answered); }
double AccuracyReport::syntactic() const { return percent(syntactic_correct, syntactic_answered); }
double AccuracyReport::total() const { return percent(correct(), answered()); }

AccuracyReport score(const Model &model, const std::vector<AnalogyQuestion> &questions,
                     const Vocabulary &vocab) {
  const NormalizedEmbeddings emb(model);
  // 1 correct, 0 wrong, -1 skipped. The expected token must be known too.
  std::vector<int> outcome(questions.size(), -1);
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < questions.size(); i += step) {
      const AnalogyQuestion &q = questions[i];
      const auto d = vocab.find(q.d);
      if (!d) continue;
      const auto got = answer(emb, vocab, q);
      if (got) outcome[i] = *got == *d ? 1 : 0;
    }
  };
  const std::size_t threads =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 16));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto &th : pool) th.join();
  }

  AccuracyReport r;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const AnalogyQuestion &q = questions[i];
    if (r.categories.empty() || r.categories.back().category != q.category) {
      r.categories.push_back({q.category, q.kind});
    }
    CategoryCount &cat = r.categories.back();
    if (outcome[i] < 0) {
      ++cat.skipped;
      ++r.skipped;
      continue;
    }
    const std::size_t ok = outcome[i] == 1 ? 1 : 0;
    ++cat.answered;
    cat.correct += ok;
    if (q.kind == QuestionKind::kSemantic) {
      ++r.semantic_answered;
      r.semantic_correct += ok;
    } else {
      ++r.syntactic_answered;
      r.syntactic_correct += ok;
    }
  }
  return r;
}

void write_report_table(std::ostream &out, const AccuracyReport &r) {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::fixed << std::setprecision(2);
  out << std::left << std::setw(32) << "category" << std::right << std::setw(10) << "correct"
      << std::setw(10) << "answered" << std::setw(10) << "skipped" << std::setw(10) << "acc%"
      << '\n';
  for (const CategoryCount &c : r.categories) {
    out << std::left << std::setw(32) << c.category << std::right << std::setw(10) << c.correct
        << std::setw(10) << c.answered << std::setw(10) << c.skipped << std::setw(10)
        << percent(c.correct, c.answered) << '\n';
  }
  out << std::left << std::setw(32) << "semantic" << std::right << std::setw(10)
      << r.semantic_correct << std::setw(10) << r.semantic_answered << std::setw(10) << ""
      << std::setw(10) << r.semantic() << '\n';
  out << std::left << std::setw(32) << "syntactic" << std::right << std::setw(10)
      << r.syntactic_correct << std::setw(10) << r.syntactic_answered << std::setw(10) << ""
      << std::setw(10) << r.syntactic() << '\n';
  out << std::left << std::setw(32) << "total" << std::right << std::setw(10) << r.correct()
      << std::setw(10) << r.answered() << std::setw(10) << r.skipped << std::setw(10)
      << r.total() << '\n';
  if (r.answered() == 0) out << "no questions answered\n";
  out.flags(old_flags);
  out.precision(old_precision);
}

void write_report_csv(std::ostream &out, const AccuracyReport &r) {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::fixed << std::setprecision(2);
  out << "#v1\n";
  out << "scope,kind,correct,answered,skipped,accuracy\n";
  for (const CategoryCount &c : r.categories) {
    out << c.category << ',' << (c.kind == QuestionKind::kSemantic ? "semantic" : "syntactic")
        << ',' << c.correct << ',' << c.answered << ',' << c.skipped << ','
        << percent(c.correct, c.answered) << '\n';
  }
  out << "semantic,semantic," << r.semantic_correct << ',' << r.semantic_answered << ",,"
      << r.semantic() << '\n';
  out << "syntactic,syntactic," << r.syntactic_correct << ',' << r.syntactic_answered << ",,"
      << r.syntactic() << '\n';
  out << "total,all," << r.correct() << ',' << r.answered() << ',' << r.skipped << ','
      << r.total() << '\n';
  out.flags(old_flags);
  out.precision(old_precision);
}

}  // namespace skipgraph
