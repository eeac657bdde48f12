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

// Command-line driver: vocab, walks, train, eval, bench-sync.
// Exit codes: 0 success, 2 usage, 1 runtime failure.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "skipgraph/corpus.h"
#include "skipgraph/engine.h"
#include "skipgraph/eval.h"
#include "skipgraph/io.h"

namespace sg = skipgraph;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

// "-" writes to stdout.
class Output {
 public:
  explicit Output(const std::string &path) : path_(path) {
    if (path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream &stream() { return path_ == "-" ? std::cout : file_; }
  void close() {
    stream().flush();
    if (!stream()) throw std::runtime_error("write failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream file_;
};

struct TrainOptions {
  std::string corpus;
  std::uint64_t min_count = 5;
  bool lowercase = false;
  std::size_t hosts = 1;
  std::string rounds = "auto";
  std::string scheme = "rmo";
  std::string combiner = "gc";
  std::string fold_order = "accumulator";
  std::string mode = "det";
  std::size_t threads = 1;
  std::string sigmoid = "fast";
  std::size_t table_size = 0;  // 0 selects the default size
  sg::ModelParams params;
  std::optional<std::uint64_t> seed;
  std::string out = "model.txt";
  std::string metrics = "metrics.csv";
  std::string manifest;
  std::string export_training;
  bool quiet = false;

  sg::Manifest to_manifest() const {
    sg::Manifest m;
    auto num = [](auto v) {
      std::ostringstream s;
      s.precision(17);
      s << v;
      return s.str();
    };
    m["format"] = "1";
    m["corpus"] = corpus;
    m["min_count"] = num(min_count);
    m["lowercase"] = lowercase ? "1" : "0";
    m["hosts"] = num(hosts);
    m["rounds"] = rounds;
    m["scheme"] = scheme;
    m["combiner"] = combiner;
    m["fold_order"] = fold_order;
    m["mode"] = mode;
    m["threads"] = num(threads);
    m["sigmoid"] = sigmoid;
    m["table_size"] = num(table_size);
    m["dim"] = num(params.dim);
    m["window"] = num(params.window);
    m["negatives"] = num(params.negatives);
    m["alpha"] = num(params.alpha0);
    m["threshold"] = num(params.subsample_threshold);
    m["epochs"] = num(params.epochs);
    m["seed"] = num(*seed);
    m["out"] = out;
    m["metrics"] = metrics;
    m["export_training"] = export_training;
    return m;
  }

  void apply_manifest(const sg::Manifest &m) {
    auto get = [&](const std::string &key) -> const std::string & {
      const auto it = m.find(key);
      if (it == m.end()) throw std::runtime_error("manifest lacks '" + key + "'");
      return it->second;
    };
    auto num = [&](const std::string &key, auto &dst) {
      std::istringstream s(get(key));
      if (!(s >> dst) || !s.eof()) throw std::runtime_error("manifest value of '" + key + "' is malformed");
    };
    if (get("format") != "1") throw std::runtime_error("unsupported manifest format");
    corpus = get("corpus");
    num("min_count", min_count);
    lowercase = get("lowercase") == "1";
    num("hosts", hosts);
    rounds = get("rounds");
    scheme = get("scheme");
    combiner = get("combiner");
    fold_order = get("fold_order");
    mode = get("mode");
    num("threads", threads);
    sigmoid = get("sigmoid");
    num("table_size", table_size);
    num("dim", params.dim);
    num("window", params.window);
    num("negatives", params.negatives);
    num("alpha", params.alpha0);
    num("threshold", params.subsample_threshold);
    num("epochs", params.epochs);
    std::uint64_t s = 0;
    num("seed", s);
    seed = s;
    export_training = get("export_training");
  }
};

sg::FoldOrder parse_fold_order(const std::string &s) {
  if (s == "accumulator") return sg::FoldOrder::kAccumulatorProjected;
  if (s == "incoming") return sg::FoldOrder::kIncomingProjected;
  throw UsageError("unknown fold order '" + s + "'");
}

sg::SigmoidMode parse_sigmoid(const std::string &s) {
  if (s == "fast") return sg::SigmoidMode::kFast;
  if (s == "exact") return sg::SigmoidMode::kExact;
  throw UsageError("unknown sigmoid mode '" + s + "'");
}

// Flag values are checked before any file is touched.
sg::RunConfig make_config(const TrainOptions &o) {
  sg::RunConfig c;
  try {
    c.hosts = o.hosts;
    if (o.rounds == "auto") {
      c.sync_rounds = 0;
    } else {
      std::size_t pos = 0;
      const unsigned long v = std::stoul(o.rounds, &pos);
      if (pos != o.rounds.size() || v < 1) throw std::invalid_argument("rounds");
      c.sync_rounds = v;
    }
    c.scheme = sg::parse_scheme(o.scheme);
    c.combiner = sg::parse_combiner(o.combiner);
    c.compute_mode = sg::parse_compute_mode(o.mode);
    c.threads_per_host = o.threads;
    c.params = o.params;
    c.params.sigmoid = parse_sigmoid(o.sigmoid);
    c.fold_order = parse_fold_order(o.fold_order);
    c.global_seed = o.seed.value_or(0);
    c.validate();
  } catch (const UsageError &) {
    throw;
  } catch (const std::exception &e) {
    throw UsageError(std::string("invalid training options: ") + e.what());
  }
  return c;
}

struct Prepared {
  sg::Vocabulary vocab;
  sg::WorkList worklist;
  sg::NegativeTable table;
};

Prepared prepare_corpus(const std::string &path, std::uint64_t min_count, bool lowercase,
                        std::size_t table_size) {
  Prepared p;
  {
    auto in = open_input(path);
    p.vocab = sg::build_vocabulary(in, min_count, lowercase);
  }
  {
    auto in = open_input(path);
    p.worklist = sg::load_worklist(in, p.vocab, lowercase);
  }
  const std::size_t size = table_size ? table_size : sg::default_negative_table_size(p.vocab.size());
  p.table = sg::build_negative_table(p.vocab, sg::kNegativeExponent, size);
  return p;
}

std::uint64_t random_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void log_round(const sg::RoundRecord &r) {
  std::fprintf(stderr,
               "epoch %zu round %zu samples %llu loss %.6f alpha %.6g O %.4f vectors %llu bytes "
               "%llu\n",
               r.epoch, r.round, static_cast<unsigned long long>(r.samples), r.mean_loss(),
               r.alpha_end, r.mean_orthogonality(),
               static_cast<unsigned long long>(r.volume.total_vectors()),
               static_cast<unsigned long long>(r.volume.bytes));
}

int cmd_vocab(const std::string &corpus, std::uint64_t min_count, bool lowercase,
              const std::string &out_path) {
  auto in = open_input(corpus);
  const sg::Vocabulary vocab = sg::build_vocabulary(in, min_count, lowercase);
  Output out(out_path);
  sg::write_vocabulary(out.stream(), vocab);
  out.close();
  return 0;
}

int cmd_walks(const std::string &graph_path, sg::WalkSpec spec, std::optional<std::uint64_t> seed,
              bool directed, const std::string &out_path) {
  try {
    spec.validate();
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  if (!seed) {
    seed = random_seed();
    std::fprintf(stderr, "seed %llu\n", static_cast<unsigned long long>(*seed));
  }
  spec.seed = *seed;
  auto in = open_input(graph_path);
  const sg::Graph graph = sg::read_edge_list(in, directed);
  const auto walks = sg::generate_walks(graph, spec);
  Output out(out_path);
  sg::write_walks(out.stream(), walks);
  out.close();
  return 0;
}

int cmd_train(TrainOptions o, const std::string &replay) {
  if (!replay.empty()) {
    auto in = open_input(replay);
    const sg::Manifest m = sg::read_manifest(in);
    o.apply_manifest(m);
  }
  if (o.corpus.empty()) throw UsageError("--corpus is required");
  if (!o.seed) {
    o.seed = random_seed();
    std::fprintf(stderr, "seed %llu\n", static_cast<unsigned long long>(*o.seed));
  }
  const sg::RunConfig config = make_config(o);
  if (o.manifest.empty()) o.manifest = o.out + ".manifest";

  const Prepared data = prepare_corpus(o.corpus, o.min_count, o.lowercase, o.table_size);
  if (!o.quiet) {
    std::fprintf(stderr, "vocabulary %zu, occurrences %zu, hosts %zu, rounds/epoch %zu\n",
                 data.vocab.size(), data.worklist.size(), config.hosts, config.rounds_per_epoch());
  }
  sg::RoundObserver observer;
  if (!o.quiet) observer = log_round;
  const sg::RunResult result =
      sg::run(config, sg::TrainingData{data.vocab, data.worklist, data.table}, observer);

  {
    Output out(o.out);
    sg::write_embeddings(out.stream(), data.vocab, result.model, sg::Label::kEmbedding);
    out.close();
  }
  if (!o.export_training.empty()) {
    Output out(o.export_training);
    sg::write_embeddings(out.stream(), data.vocab, result.model, sg::Label::kTraining);
    out.close();
  }
  {
    Output out(o.metrics);
    sg::write_metrics_csv(out.stream(), config, result.metrics);
    out.close();
  }
  {
    Output out(o.manifest);
    sg::write_manifest(out.stream(), o.to_manifest());
    out.close();
  }
  return 0;
}

int cmd_eval(const std::string &model_path, const std::string &questions_path, bool lowercase,
             const std::string &report_path) {
  auto model_in = open_input(model_path);
  const sg::LoadedEmbeddings emb = sg::read_embeddings(model_in);
  auto q_in = open_input(questions_path);
  const auto questions = sg::load_questions(q_in, lowercase);
  const sg::AccuracyReport report = sg::score(emb.model, questions, emb.vocab);
  sg::write_report_table(std::cout, report);
  if (!report_path.empty()) {
    Output out(report_path);
    sg::write_report_csv(out.stream(), report);
    out.close();
  }
  return 0;
}

int cmd_bench_sync(TrainOptions o, const std::vector<std::string> &schemes,
                   const std::string &out_path) {
  if (schemes.empty()) throw UsageError("--schemes needs at least one scheme");
  if (!o.seed) {
    o.seed = random_seed();
    std::fprintf(stderr, "seed %llu\n", static_cast<unsigned long long>(*o.seed));
  }
  o.params.epochs = 1;
  std::vector<sg::RunConfig> configs;
  for (const std::string &s : schemes) {
    o.scheme = s;
    configs.push_back(make_config(o));
  }
  const Prepared data = prepare_corpus(o.corpus, o.min_count, o.lowercase, o.table_size);
  Output out(out_path);
  std::ostream &os = out.stream();
  os << "#v1\n";
  os << "scheme,hosts,rounds,inspection_s,compute_s,communication_s,reduce_vectors,"
        "broadcast_vectors,id_count,messages,bytes\n";
  for (const sg::RunConfig &c : configs) {
    const sg::RunResult r = sg::run(c, sg::TrainingData{data.vocab, data.worklist, data.table});
    double insp = 0, comp = 0, comm = 0;
    for (const auto &rec : r.metrics.rounds) {
      insp += rec.inspection_seconds;
      comp += rec.compute_seconds;
      comm += rec.communication_seconds;
    }
    const sg::VolumeMeter v = r.metrics.total_volume();
    os << sg::to_string(c.scheme) << ',' << c.hosts << ',' << c.rounds_per_epoch() << ',' << insp
       << ',' << comp << ',' << comm << ',' << v.reduce_vectors << ',' << v.broadcast_vectors
       << ',' << v.id_count << ',' << v.messages << ',' << v.bytes << '\n';
    if (!o.quiet) {
      std::fprintf(stderr, "%s done, %llu bytes\n", std::string(sg::to_string(c.scheme)).c_str(),
                   static_cast<unsigned long long>(v.bytes));
    }
  }
  out.close();
  return 0;
}

void add_model_flags(CLI::App *cmd, TrainOptions &o) {
  cmd->add_option("--min-count", o.min_count, "Drop tokens rarer than this")->capture_default_str();
  cmd->add_flag("--lowercase", o.lowercase, "Lowercase tokens (ASCII)");
  cmd->add_option("--hosts", o.hosts, "Simulated hosts")->capture_default_str();
  cmd->add_option("--rounds", o.rounds, "Sync rounds per epoch, or auto")->capture_default_str();
  cmd->add_option("--combiner", o.combiner, "avg or gc")->capture_default_str();
  cmd->add_option("--fold-order", o.fold_order, "accumulator or incoming")->capture_default_str();
  cmd->add_option("--dim", o.params.dim, "Vector dimension")->capture_default_str();
  cmd->add_option("--window", o.params.window, "Max window size")->capture_default_str();
  cmd->add_option("--negatives", o.params.negatives, "Negatives per positive")
      ->capture_default_str();
  cmd->add_option("--alpha", o.params.alpha0, "Initial learning rate")->capture_default_str();
  cmd->add_option("--threshold", o.params.subsample_threshold, "Subsampling threshold")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Global seed (random when absent)");
  cmd->add_option("--mode", o.mode, "det or racy")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Workers per host in racy mode")->capture_default_str();
  cmd->add_option("--sigmoid", o.sigmoid, "fast or exact")->capture_default_str();
  cmd->add_option("--table-size", o.table_size, "Negative table slots (0 = default)")
      ->capture_default_str();
  cmd->add_flag("--quiet", o.quiet, "No per-round log lines");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Distributed skip-gram embedding trainer"};
  app.require_subcommand(1, 1);

  std::string corpus, out_path = "-", graph, model_path, questions, report;
  std::uint64_t min_count = 5;
  bool lowercase = false, directed = false;
  sg::WalkSpec walk_spec;
  std::optional<std::uint64_t> walk_seed;
  TrainOptions train;
  std::string replay;
  TrainOptions bench;
  std::vector<std::string> schemes{"rmn", "rmo", "pmb", "pmo"};
  std::string bench_out = "-";

  auto *vocab = app.add_subcommand("vocab", "Count tokens and write the vocabulary");
  vocab->add_option("--corpus", corpus, "Corpus file")->required();
  vocab->add_option("--min-count", min_count, "Drop tokens rarer than this")->capture_default_str();
  vocab->add_flag("--lowercase", lowercase, "Lowercase tokens (ASCII)");
  vocab->add_option("--out", out_path, "Output path or -")->capture_default_str();

  auto *walks = app.add_subcommand("walks", "Generate random-walk corpus from an edge list");
  walks->add_option("--graph", graph, "Edge list file")->required();
  walks->add_option("--walks", walk_spec.walks_per_node, "Walks per vertex")->capture_default_str();
  walks->add_option("--length", walk_spec.walk_length, "Walk length")->capture_default_str();
  walks->add_option("--seed", walk_seed, "Seed (random when absent)");
  walks->add_flag("--directed", directed, "Keep edges one-way");
  walks->add_option("--out", out_path, "Output path or -")->capture_default_str();

  auto *tr = app.add_subcommand("train", "Train embeddings on simulated hosts");
  tr->add_option("--corpus", train.corpus, "Corpus file");
  tr->add_option("--epochs", train.params.epochs, "Epochs")->capture_default_str();
  tr->add_option("--scheme", train.scheme, "rmn, rmo, pmb or pmo")->capture_default_str();
  add_model_flags(tr, train);
  tr->add_option("--out", train.out, "Embedding output")->capture_default_str();
  tr->add_option("--metrics", train.metrics, "Per-round metrics CSV")->capture_default_str();
  tr->add_option("--manifest", train.manifest, "Run manifest (default: OUT.manifest)");
  tr->add_option("--export-training", train.export_training, "Also write the training vectors");
  tr->add_option("--replay", replay, "Rerun the configuration recorded in a manifest");

  auto *ev = app.add_subcommand("eval", "Score analogy questions");
  ev->add_option("--model", model_path, "Embedding file")->required();
  ev->add_option("--questions", questions, "Question file")->required();
  ev->add_flag("--lowercase", lowercase, "Lowercase the questions");
  ev->add_option("--report", report, "CSV report path or -");

  auto *bs = app.add_subcommand("bench-sync", "Compare sync schemes over one epoch");
  bs->add_option("--corpus", bench.corpus, "Corpus file")->required();
  add_model_flags(bs, bench);
  bs->add_option("--schemes", schemes, "Comma-separated schemes")->delimiter(',')
      ->capture_default_str();
  bs->add_option("--out", bench_out, "CSV output path or -")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*vocab) return cmd_vocab(corpus, min_count, lowercase, out_path);
    if (*walks) return cmd_walks(graph, walk_spec, walk_seed, directed, out_path);
    if (*tr) return cmd_train(train, replay);
    if (*ev) return cmd_eval(model_path, questions, lowercase, report);
    if (*bs) return cmd_bench_sync(bench, schemes, bench_out);
  } catch (const UsageError &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
