// Copyright 2026 The replymatch Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "replymatch/corpus.hpp"
#include "replymatch/decode.hpp"
#include "replymatch/errors.hpp"
#include "replymatch/features.hpp"
#include "replymatch/matching.hpp"
#include "replymatch/metrics.hpp"
#include "replymatch/scorer.hpp"

namespace replymatch::cli {
namespace {

namespace fs = std::filesystem;

// Missing files, unreadable directories and bad option values.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

std::string shortest(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

// Re-throws parse and validation failures with the offending file named.
template <class F>
auto with_file(const fs::path& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

struct NamedLog {
  std::string name;
  ChatLog log;
  LinkSet gold;
};

std::vector<NamedLog> load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("not a corpus directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no .jsonl logs in " + dir.string());

  std::vector<NamedLog> corpus;
  for (const auto& file : files) {
    NamedLog item;
    item.name = file.stem().string();
    const std::string text = read_file(file);
    item.log = with_file(file, [&] { return read_canonical(text, item.name); });
    fs::path ann = file;
    ann.replace_extension(".ann");
    const std::string ann_text = read_file(ann);
    item.gold = with_file(ann, [&] { return parse_annotations(ann_text, item.log); });
    corpus.push_back(std::move(item));
  }
  return corpus;
}

ScoreMatrix load_scores(const fs::path& dir, const NamedLog& item) {
  const fs::path file = dir / (item.name + ".scores");
  const std::string text = read_file(file);
  return with_file(file, [&] {
    ScoreMatrix matrix = import_scores(text);
    matrix.validate(item.log.size());
    return matrix;
  });
}

std::vector<ScoreMatrix> load_all_scores(const fs::path& dir,
                                         const std::vector<NamedLog>& corpus) {
  std::vector<ScoreMatrix> out;
  out.reserve(corpus.size());
  for (const auto& item : corpus) out.push_back(load_scores(dir, item));
  return out;
}

// Rows are windows clipped at the log start, so the longest row recovers
// the candidate window size exactly as far as this log is concerned.
std::size_t window_of(const ScoreMatrix& matrix) {
  std::size_t k = 1;
  for (const auto& row : matrix.rows()) k = std::max(k, row.candidates.size());
  return k;
}

// Runs body(i) for i in [0, n) on up to `jobs` threads. The first failure
// in index order is re-thrown, so error reporting does not depend on timing.
void for_each_index(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::optional<EmbeddingTable> maybe_embeddings(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return with_file(path, [&] { return parse_embeddings(read_file(path)); });
}

// key=value lines fill options that were not given on the command line.
// Underscores in keys are read as dashes; `#` starts a comment line.
void apply_config(CLI::App& sub, const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    const auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r");
      if (first == std::string::npos) return std::string();
      return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
    };
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw InputError(where + "expected key=value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = key == "config" ? nullptr : sub.get_option_no_throw("--" + key);
    if (opt == nullptr) throw InputError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw InputError(where + "duplicate key '" + key + "'");
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw InputError(where + e.what());
    }
  }
}

void require(bool present, const std::string& flag) {
  if (!present) throw InputError("missing required option " + flag);
}

// ---------------------------------------------------------------------------

struct IngestOptions {
  std::string log, ann, out, name;
};

int cmd_ingest(const IngestOptions& o, std::ostream& out) {
  require(!o.log.empty(), "--log");
  require(!o.out.empty(), "--out");
  const fs::path log_path(o.log);
  const std::string name = o.name.empty() ? log_path.stem().string() : o.name;
  const std::string text = read_file(log_path);
  const ChatLog log = with_file(log_path, [&] { return parse_chat_log(text, name); });

  LinkSet gold;
  if (o.ann.empty()) {
    for (std::size_t i = 0; i < log.size(); ++i) gold.add(i, i);
  } else {
    const std::string ann_text = read_file(o.ann);
    gold = with_file(o.ann, [&] { return parse_annotations(ann_text, log); });
  }

  const fs::path dir(o.out);
  write_file(dir / (name + ".jsonl"), write_canonical(log));
  write_file(dir / (name + ".ann"), format_links(gold));

  const auto threads = connected_threads(gold, log.size()).thread_count();
  out << "log=" << name << " N=" << log.size() << " threads=" << threads
      << " avg_parent=" << fixed(average_parents(gold), 4) << "\n";
  return kExitOk;
}

struct TrainOptions {
  std::string train, valid, model, embeddings;
  std::size_t k_c = 50;
  double thread_alpha = 0.0;
  std::size_t k_t = 10;
  std::size_t thread_truncation = 5;
  TrainConfig config;
  int jobs = 1;
};

std::vector<Example> corpus_examples(const std::vector<NamedLog>& corpus, std::size_t k_c,
                                     const FeatureConfig& features, const EmbeddingTable* table,
                                     const MultiTaskConfig* multitask, int jobs,
                                     std::size_t& discarded) {
  std::vector<std::vector<Example>> per_log(corpus.size());
  std::vector<std::size_t> dropped(corpus.size(), 0);
  for_each_index(corpus.size(), jobs, [&](std::size_t k) {
    per_log[k] = make_examples(corpus[k].log, corpus[k].gold, k_c, features, table, multitask,
                               &dropped[k]);
  });
  std::vector<Example> all;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    discarded += dropped[k];
    std::move(per_log[k].begin(), per_log[k].end(), std::back_inserter(all));
  }
  return all;
}

int cmd_train(const TrainOptions& o, std::ostream& out) {
  require(!o.train.empty(), "--train");
  require(!o.valid.empty(), "--valid");
  require(!o.model.empty(), "--model");
  if (o.k_c == 0) throw InputError("--k-c must be positive");

  const auto train_corpus = load_corpus(o.train);
  const auto valid_corpus = load_corpus(o.valid);
  const auto table = maybe_embeddings(o.embeddings);
  FeatureConfig features;
  if (table) {
    features.use_embeddings = true;
    features.embedding_dim = table->dim();
  }
  const EmbeddingTable* table_ptr = table ? &*table : nullptr;
  MultiTaskConfig multitask{o.thread_alpha, o.k_t, o.thread_truncation};
  const MultiTaskConfig* mt = o.thread_alpha > 0.0 ? &multitask : nullptr;

  std::size_t discarded = 0;
  const auto train =
      corpus_examples(train_corpus, o.k_c, features, table_ptr, mt, o.jobs, discarded);
  std::size_t valid_discarded = 0;
  const auto valid =
      corpus_examples(valid_corpus, o.k_c, features, table_ptr, mt, o.jobs, valid_discarded);
  out << "train_instances=" << train.size() << " discarded=" << discarded
      << " valid_instances=" << valid.size() << "\n";

  const TrainResult result = train_mf(train, valid, features.dimension(), o.config, multitask);
  for (const auto& entry : result.log) {
    out << "eval=" << entry.evaluation << " step=" << entry.step
        << " epoch=" << fixed(entry.epoch, 3) << " loss=" << fixed(entry.train_loss)
        << " valid_r1=" << fixed(entry.valid_recall1) << "\n";
  }
  out << "best_eval=" << result.best_evaluation << " best_r1=" << fixed(result.best_recall1)
      << " stopped_early=" << (result.stopped_early ? 1 : 0) << "\n";
  write_file(o.model, result.model.to_json(features));
  return kExitOk;
}

struct ScoreOptions {
  std::string corpus, out, model, import_dir, embeddings;
  std::size_t k_c = 50;
  int jobs = 1;
};

int cmd_score(const ScoreOptions& o, std::ostream& out) {
  require(!o.corpus.empty(), "--corpus");
  require(!o.out.empty(), "--out");
  if (o.model.empty() == o.import_dir.empty()) {
    throw InputError("give exactly one of --model and --import");
  }
  const auto corpus = load_corpus(o.corpus);
  std::vector<ScoreMatrix> matrices(corpus.size());

  if (!o.import_dir.empty()) {
    matrices = load_all_scores(o.import_dir, corpus);
  } else {
    if (o.k_c == 0) throw InputError("--k-c must be positive");
    FeatureConfig features;
    const MfModel model =
        with_file(o.model, [&] { return MfModel::from_json(read_file(o.model), &features); });
    const auto table = maybe_embeddings(o.embeddings);
    if (features.use_embeddings) {
      if (!table) throw InputError("model uses embeddings; pass --embeddings");
      if (table->dim() != features.embedding_dim) {
        throw InputError("embedding dimension " + std::to_string(table->dim()) +
                         " does not match the model (" +
                         std::to_string(features.embedding_dim) + ")");
      }
    }
    const EmbeddingTable* table_ptr = features.use_embeddings ? &*table : nullptr;
    for_each_index(corpus.size(), o.jobs, [&](std::size_t k) {
      matrices[k] = score_log(model, corpus[k].log, o.k_c, features, table_ptr);
    });
  }

  for (std::size_t k = 0; k < corpus.size(); ++k) {
    write_file(fs::path(o.out) / (corpus[k].name + ".scores"), export_scores(matrices[k]));
    out << corpus[k].name << " rows=" << matrices[k].size() << "\n";
  }
  return kExitOk;
}

struct CapacityOptions {
  std::string freq = "heuristic";
  double alpha = 1.3;
  double beta = 0.2;
  std::string regressor;
};

class CapacitySource {
 public:
  explicit CapacitySource(const CapacityOptions& o) : o_(o) {
    if (o.freq == "regressor") {
      require(!o.regressor.empty(), "--regressor");
      model_ = with_file(o.regressor,
                         [&] { return FreqRegressor::from_json(read_file(o.regressor)); });
    } else if (o.freq != "heuristic" && o.freq != "oracle") {
      throw InputError("unknown --freq '" + o.freq + "'");
    }
  }

  CapacityVector operator()(const NamedLog& item, const ScoreMatrix& matrix) const {
    if (o_.freq == "oracle") return oracle_capacities(item.gold, item.log.size(), window_of(matrix));
    if (o_.freq == "regressor") return estimate_freq_regressor(*model_, matrix);
    return estimate_freq_heuristic(score_mass(matrix), {o_.alpha, o_.beta});
  }

 private:
  CapacityOptions o_;
  std::optional<FreqRegressor> model_;
};

struct DecodeOptions {
  std::string corpus, scores, out, mode = "greedy";
  CapacityOptions capacity;
  bool strict = false;
  int jobs = 1;
};

int cmd_decode(const DecodeOptions& o, std::ostream& out, std::ostream& err) {
  require(!o.corpus.empty(), "--corpus");
  require(!o.out.empty(), "--out");
  if (o.mode != "greedy" && o.mode != "bipartite" && o.mode != "last-mention") {
    throw InputError("unknown --mode '" + o.mode + "'");
  }
  const auto corpus = load_corpus(o.corpus);
  std::vector<ScoreMatrix> matrices;
  if (o.mode != "last-mention") {
    require(!o.scores.empty(), "--scores");
    matrices = load_all_scores(o.scores, corpus);
  }
  std::optional<CapacitySource> capacities;
  if (o.mode == "bipartite") capacities.emplace(o.capacity);

  struct Decoded {
    LinkSet links;
    std::optional<CapacityVector> caps;
    std::size_t unmatched = 0;
    bool infeasible = false;
  };
  std::vector<Decoded> decoded(corpus.size());
  for_each_index(corpus.size(), o.jobs, [&](std::size_t k) {
    Decoded& d = decoded[k];
    if (o.mode == "last-mention") {
      d.links = last_mention_links(corpus[k].log);
    } else if (o.mode == "greedy") {
      d.links = greedy_decode(matrices[k]);
    } else {
      d.caps = (*capacities)(corpus[k], matrices[k]);
      const auto result = bipartite_links(matrices[k], *d.caps,
                                          o.strict ? MatchMode::kStrict : MatchMode::kRelaxed);
      d.links = result.links;
      d.unmatched = result.match.unmatched_left.size();
      d.infeasible = o.strict && !result.match.feasible_strict;
    }
  });

  bool any_infeasible = false;
  const fs::path dir(o.out);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& name = corpus[k].name;
    const auto& d = decoded[k];
    const ThreadPartition threads = threads_from_links(d.links, corpus[k].log.size());
    write_file(dir / (name + ".links"), format_links(d.links));
    write_file(dir / (name + ".threads"), format_threads(threads));
    if (d.caps) write_file(dir / (name + ".freq"), format_capacities(*d.caps));
    out << name << " links=" << d.links.size() << " threads=" << threads.thread_count();
    if (d.caps) out << " capacity=" << d.caps->total() << " unmatched=" << d.unmatched;
    out << "\n";
    if (d.infeasible) {
      err << "strict matching infeasible for " << name << ": " << d.unmatched
          << " UOI(s) left unmatched\n";
      any_infeasible = true;
    }
  }
  return any_infeasible ? kExitInfeasible : kExitOk;
}

struct EstimateOptions {
  std::string corpus, scores, out;
  CapacityOptions capacity;
  std::string fit_regressor, valid_corpus, valid_scores;
  std::size_t k_c = 50;
  RegressorTrainConfig train;
};

int cmd_estimate(const EstimateOptions& o, std::ostream& out) {
  require(!o.corpus.empty(), "--corpus");
  require(!o.scores.empty(), "--scores");
  const auto corpus = load_corpus(o.corpus);
  const auto matrices = load_all_scores(o.scores, corpus);

  if (!o.fit_regressor.empty()) {
    if (o.k_c == 0) throw InputError("--k-c must be positive");
    std::vector<LinkSet> gold;
    for (const auto& item : corpus) gold.push_back(item.gold);
    Eigen::MatrixXd inputs, valid_inputs;
    Eigen::VectorXd targets, valid_targets;
    regressor_dataset(matrices, gold, o.k_c, inputs, targets);
    if (!o.valid_corpus.empty()) {
      require(!o.valid_scores.empty(), "--valid-scores");
      const auto vcorpus = load_corpus(o.valid_corpus);
      const auto vmatrices = load_all_scores(o.valid_scores, vcorpus);
      std::vector<LinkSet> vgold;
      for (const auto& item : vcorpus) vgold.push_back(item.gold);
      regressor_dataset(vmatrices, vgold, o.k_c, valid_inputs, valid_targets);
    }
    const auto result =
        train_freq_regressor(inputs, targets, o.k_c, o.train, valid_inputs, valid_targets);
    out << "samples=" << targets.size() << " train_mse=" << fixed(result.train_mse.back());
    if (!result.valid_mse.empty()) {
      out << " best_valid_mse=" << fixed(result.valid_mse[result.best_epoch - 1]);
    }
    out << " best_epoch=" << result.best_epoch << "\n";
    write_file(o.fit_regressor, result.model.to_json());
    return kExitOk;
  }

  require(!o.out.empty(), "--out");
  const CapacitySource source(o.capacity);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const CapacityVector caps = source(corpus[k], matrices[k]);
    write_file(fs::path(o.out) / (corpus[k].name + ".freq"), format_capacities(caps));
    out << corpus[k].name << " capacity=" << caps.total() << " N=" << caps.size() << "\n";
  }
  return kExitOk;
}

struct SweepOptions {
  std::string corpus, scores, out;
  std::vector<double> alphas, betas;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
  require(!o.corpus.empty(), "--corpus");
  require(!o.scores.empty(), "--scores");
  const auto corpus = load_corpus(o.corpus);
  const auto matrices = load_all_scores(o.scores, corpus);
  std::vector<LinkSet> gold;
  for (const auto& item : corpus) gold.push_back(item.gold);

  HeuristicGrid grid = HeuristicGrid::standard();
  if (!o.alphas.empty()) grid.alphas = o.alphas;
  if (!o.betas.empty()) grid.betas = o.betas;
  const SweepResult result = sweep_heuristic(matrices, gold, grid);
  for (const auto& p : result.points) {
    out << "alpha=" << shortest(p.params.alpha) << " beta=" << shortest(p.params.beta)
        << " f1=" << fixed(p.f1) << "\n";
  }
  out << "best alpha=" << shortest(result.best.alpha) << " beta=" << shortest(result.best.beta)
      << " f1=" << fixed(result.best_f1) << " points=" << result.points.size() << "\n";
  if (!o.out.empty()) {
    // Loadable as a decode config.
    write_file(o.out, "alpha=" + shortest(result.best.alpha) + "\nbeta=" +
                          shortest(result.best.beta) + "\n# f1=" + fixed(result.best_f1) + "\n");
  }
  return kExitOk;
}

struct EvalOptions {
  std::string corpus, pred, scores, format = "table";
  bool macro = false;
  bool exact_all = false;
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  require(!o.corpus.empty(), "--corpus");
  require(!o.pred.empty(), "--pred");
  if (o.format != "table" && o.format != "records" && o.format != "both") {
    throw InputError("unknown --format '" + o.format + "'");
  }
  const auto corpus = load_corpus(o.corpus);
  EvalAccumulator acc(o.exact_all ? ExactMatchPrecision::kAllPredictions
                                  : ExactMatchPrecision::kMultiUtterancePredictions);
  for (const auto& item : corpus) {
    const fs::path file = fs::path(o.pred) / (item.name + ".links");
    const std::string text = read_file(file);
    const LinkSet pred = with_file(file, [&] { return parse_annotations(text, item.log); });
    std::optional<ScoreMatrix> matrix;
    if (!o.scores.empty()) matrix = load_scores(o.scores, item);
    with_file(file, [&] {
      acc.add(pred, item.gold, item.log.size(), matrix ? &*matrix : nullptr);
      return 0;
    });
  }
  const MetricReport report = acc.report(o.macro);
  if (o.format != "records") out << format_report_table(report);
  if (o.format != "table") out << format_report_records(report);
  return kExitOk;
}

void add_capacity_options(CLI::App* sub, CapacityOptions& o) {
  sub->add_option("--freq", o.freq, "Capacity source: heuristic, regressor or oracle");
  sub->add_option("--alpha", o.alpha, "Heuristic slope");
  sub->add_option("--beta", o.beta, "Heuristic offset");
  sub->add_option("--regressor", o.regressor, "Capacity regressor model file");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chat disentanglement by reply scoring and capacity-constrained matching",
               "replymatch"};
  app.require_subcommand(1);

  std::map<CLI::App*, std::string> configs;
  std::map<CLI::App*, std::function<int()>> handlers;
  const auto add_sub = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", configs[sub], "key=value file; command-line flags take precedence");
    return sub;
  };

  IngestOptions ingest;
  {
    CLI::App* sub = add_sub("ingest", "Parse a raw log and its annotation into a corpus directory");
    sub->add_option("--log", ingest.log, "Raw chat log");
    sub->add_option("--ann", ingest.ann, "Annotation file (parent child per line)");
    sub->add_option("--out", ingest.out, "Corpus directory to write");
    sub->add_option("--name", ingest.name, "Log name (default: log file stem)");
    handlers[sub] = [&] { return cmd_ingest(ingest, out); };
  }

  TrainOptions train;
  {
    CLI::App* sub = add_sub("train", "Train the feedforward reply scorer");
    sub->add_option("--train", train.train, "Training corpus directory");
    sub->add_option("--valid", train.valid, "Validation corpus directory");
    sub->add_option("--model", train.model, "Model file to write");
    sub->add_option("--embeddings", train.embeddings, "Word vectors (word v1 ... vd)");
    sub->add_option("--k-c", train.k_c, "Candidate window size");
    sub->add_option("--thread-alpha", train.thread_alpha, "Weight of the thread loss");
    sub->add_option("--k-t", train.k_t, "Thread pool size");
    sub->add_option("--thread-truncation", train.thread_truncation,
                    "Latest members kept per thread");
    sub->add_option("--lr", train.config.learning_rate, "Adam learning rate");
    sub->add_option("--batch", train.config.batch_size, "Minibatch size");
    sub->add_option("--eval-interval", train.config.eval_interval_epochs,
                    "Epochs between validation runs");
    sub->add_option("--patience", train.config.patience, "Evaluations without improvement");
    sub->add_option("--max-epochs", train.config.max_epochs, "Epoch limit");
    sub->add_option("--hidden", train.config.hidden, "Hidden width");
    sub->add_option("--seed", train.config.seed, "Random seed");
    sub->add_option("--jobs", train.jobs, "Worker threads across logs");
    handlers[sub] = [&] { return cmd_train(train, out); };
  }

  ScoreOptions score;
  {
    CLI::App* sub = add_sub("score", "Write a score matrix per log");
    sub->add_option("--corpus", score.corpus, "Corpus directory");
    sub->add_option("--out", score.out, "Directory for NAME.scores");
    sub->add_option("--model", score.model, "Trained scorer");
    sub->add_option("--import", score.import_dir, "Directory of externally produced scores");
    sub->add_option("--embeddings", score.embeddings, "Word vectors used by the model");
    sub->add_option("--k-c", score.k_c, "Candidate window size");
    sub->add_option("--jobs", score.jobs, "Worker threads across logs");
    handlers[sub] = [&] { return cmd_score(score, out); };
  }

  DecodeOptions decode;
  {
    CLI::App* sub = add_sub("decode", "Turn scores into links and threads");
    sub->add_option("--corpus", decode.corpus, "Corpus directory");
    sub->add_option("--scores", decode.scores, "Directory of NAME.scores");
    sub->add_option("--out", decode.out, "Directory for NAME.links, NAME.threads, NAME.freq");
    sub->add_option("--mode", decode.mode, "greedy, bipartite or last-mention");
    add_capacity_options(sub, decode.capacity);
    sub->add_flag("--strict", decode.strict, "Require every UOI to be matched");
    sub->add_option("--jobs", decode.jobs, "Worker threads across logs");
    handlers[sub] = [&] { return cmd_decode(decode, out, err); };
  }

  EstimateOptions estimate;
  {
    CLI::App* sub = add_sub("estimate-freq", "Estimate capacities or fit the capacity regressor");
    sub->add_option("--corpus", estimate.corpus, "Corpus directory");
    sub->add_option("--scores", estimate.scores, "Directory of NAME.scores");
    sub->add_option("--out", estimate.out, "Directory for NAME.freq");
    add_capacity_options(sub, estimate.capacity);
    sub->add_option("--fit-regressor", estimate.fit_regressor,
                    "Train a regressor on oracle capacities and write it here");
    sub->add_option("--valid-corpus", estimate.valid_corpus, "Validation corpus directory");
    sub->add_option("--valid-scores", estimate.valid_scores, "Validation score directory");
    sub->add_option("--k-c", estimate.k_c, "Candidate window size");
    sub->add_option("--epochs", estimate.train.epochs, "Regressor epochs");
    sub->add_option("--hidden", estimate.train.hidden, "Regressor hidden width");
    sub->add_option("--lr", estimate.train.learning_rate, "Adam learning rate");
    sub->add_option("--batch", estimate.train.batch_size, "Minibatch size");
    sub->add_option("--seed", estimate.train.seed, "Random seed");
    handlers[sub] = [&] { return cmd_estimate(estimate, out); };
  }

  SweepOptions sweep;
  {
    CLI::App* sub = add_sub("sweep", "Grid search over the capacity heuristic");
    sub->add_option("--corpus", sweep.corpus, "Corpus directory");
    sub->add_option("--scores", sweep.scores, "Directory of NAME.scores");
    sub->add_option("--out", sweep.out, "File for the best parameters");
    sub->add_option("--alphas", sweep.alphas, "Slope grid")->delimiter(',');
    sub->add_option("--betas", sweep.betas, "Offset grid")->delimiter(',');
    handlers[sub] = [&] { return cmd_sweep(sweep, out); };
  }

  EvalOptions eval;
  {
    CLI::App* sub = add_sub("eval", "Score predicted links against gold");
    sub->add_option("--corpus", eval.corpus, "Corpus directory with gold annotations");
    sub->add_option("--pred", eval.pred, "Directory of predicted NAME.links");
    sub->add_option("--scores", eval.scores, "Directory of NAME.scores (enables Recall@k)");
    sub->add_flag("--macro", eval.macro, "Average per log instead of pooling");
    sub->add_flag("--exact-all", eval.exact_all,
                  "Count predicted singletons in exact-match precision");
    sub->add_option("--format", eval.format, "table, records or both");
    handlers[sub] = [&] { return cmd_eval(eval, out); };
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    for (auto& [sub, handler] : handlers) {
      if (!sub->parsed()) continue;
      if (!configs[sub].empty()) apply_config(*sub, configs[sub]);
      return handler();
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace replymatch::cli
