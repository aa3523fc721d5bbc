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

// Pairwise reply-to scoring: candidate pools, the LastMention baseline, the
// feature-based MF scorer with its softmax cross-entropy objective, the
// multi-task thread-classification extension, and score-matrix files.

#ifndef REPLYMATCH_SCORER_HPP_
#define REPLYMATCH_SCORER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "replymatch/corpus.hpp"
#include "replymatch/features.hpp"
#include "replymatch/nn.hpp"

namespace replymatch {

inline constexpr std::size_t kDefaultCandidateWindow = 50;

struct CandidatePool {
  std::size_t uoi = 0;
  std::size_t k_c = 0;
  // Ascending; the UOI itself is always last.
  std::vector<std::size_t> candidates;
};

CandidatePool build_candidate_pool(std::size_t i, std::size_t k_c);

struct TrainingInstance {
  CandidatePool pool;
  // Position of the latest in-window gold parent within pool.candidates.
  std::size_t label = 0;
};

struct TrainingSet {
  std::vector<TrainingInstance> instances;
  std::size_t discarded = 0;
};

/// One instance per UOI with a gold parent inside its window; the rest are
/// counted in `discarded`.
TrainingSet build_training_instances(const ChatLog& log, const LinkSet& gold, std::size_t k_c);

/// Most recent earlier utterance by a mentioned user, else i - 1, else i.
std::size_t last_mention_predict(const ChatLog& log, std::size_t i);
LinkSet last_mention_links(const ChatLog& log);

// ---------------------------------------------------------------------------
// Score matrices

struct ScoreRow {
  std::size_t uoi = 0;
  std::vector<std::size_t> candidates;
  std::vector<double> scores;

  bool operator==(const ScoreRow&) const = default;
};

class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  explicit ScoreMatrix(std::vector<ScoreRow> rows) : rows_(std::move(rows)) {}

  std::size_t size() const { return rows_.size(); }
  const ScoreRow& operator[](std::size_t i) const { return rows_[i]; }
  const std::vector<ScoreRow>& rows() const { return rows_; }
  std::vector<ScoreRow>& mutable_rows() { return rows_; }

  /// Softmax of row i.
  std::vector<double> probabilities(std::size_t i) const;

  /// Checks one row per utterance in order, finite scores, and candidate
  /// lists equal to the window of size k_c (inferred from the longest row
  /// when unset). Throws ValidationError.
  void validate(std::size_t n, std::optional<std::size_t> k_c = std::nullopt) const;

  bool operator==(const ScoreMatrix&) const = default;

 private:
  std::vector<ScoreRow> rows_;
};

std::vector<double> softmax(std::span<const double> scores);

/// Position of the maximum; ties go to the later position (most recent
/// candidate). Throws ValidationError on an empty span.
std::size_t argmax_recent(std::span<const double> scores);

/// Line records `uoi<TAB>c1 c2 ...<TAB>s1 s2 ...`, shortest round-trip
/// decimal formatting. Lines starting with '#' are comments.
std::string export_scores(const ScoreMatrix& matrix);
ScoreMatrix import_scores(std::string_view text);

// ---------------------------------------------------------------------------
// MF scorer

/// Two softsign layers over the pair features; the reply score is the sum of
/// the second layer's activations. A linear thread head reads the same
/// second layer plus two thread descriptors (size, recency).
class MfModel {
 public:
  static constexpr Eigen::Index kThreadExtras = 2;

  MfModel() = default;
  MfModel(std::size_t input_dim, std::size_t hidden);

  /// Glorot-uniform weights, zero biases.
  void initialize(std::uint64_t seed);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden() const { return hidden_; }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  struct Trunk {
    Eigen::MatrixXd pre1, act1, pre2, act2;
  };

  /// Columns of `inputs` are feature vectors.
  Trunk forward(const Eigen::MatrixXd& inputs) const;
  Eigen::VectorXd reply_scores(const Trunk& trunk) const;
  Eigen::VectorXd thread_scores(const Trunk& trunk, const Eigen::MatrixXd& extras) const;

  /// Adds d(loss)/d(params) to `grad` given d(loss)/d(score) per column.
  void backward_reply(const Eigen::MatrixXd& inputs, const Trunk& trunk,
                      const Eigen::VectorXd& dscores, Eigen::VectorXd& grad) const;
  void backward_thread(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& extras,
                       const Trunk& trunk, const Eigen::VectorXd& dscores,
                       Eigen::VectorXd& grad) const;

  std::string to_json(const FeatureConfig& features) const;
  static MfModel from_json(std::string_view text, FeatureConfig* features = nullptr);

 private:
  void backward_trunk(const Eigen::MatrixXd& inputs, const Trunk& trunk,
                      const Eigen::MatrixXd& dact2, Eigen::VectorXd& grad) const;

  std::size_t input_dim_ = 0;
  std::size_t hidden_ = 0;
  nn::Slot w1_, b1_, w2_, b2_, thread_w_, thread_u_, thread_c_;
  Eigen::VectorXd params_;
};

/// r_ij for one feature vector. Throws ValidationError on dimension mismatch.
double mf_score(const MfModel& model, std::span<const double> features);

/// Feature matrix (dimension x pool size) for one UOI.
Eigen::MatrixXd pool_features(const ChatLog& log, const CandidatePool& pool,
                              const FeatureConfig& config, const EmbeddingTable* table);

ScoreMatrix score_log(const MfModel& model, const ChatLog& log, std::size_t k_c,
                      const FeatureConfig& config, const EmbeddingTable* table = nullptr);

// ---------------------------------------------------------------------------
// Objectives

struct RowLoss {
  double loss = 0.0;
  std::vector<std::vector<double>> grads;  // d(loss)/d(raw score), per row
};

/// Sum over rows of -log softmax(row)[label]; gradients are p - onehot.
RowLoss loss_reply(const std::vector<std::vector<double>>& rows,
                   const std::vector<std::size_t>& labels);

struct JointLoss {
  double total = 0.0;
  double reply = 0.0;
  double thread = 0.0;
  std::vector<std::vector<double>> reply_grads;
  std::vector<std::vector<double>> thread_grads;
};

/// L = L_r + alpha * L_t, both softmax cross-entropy sums.
JointLoss loss_joint(const std::vector<std::vector<double>>& reply_rows,
                     const std::vector<std::size_t>& reply_labels,
                     const std::vector<std::vector<double>>& thread_rows,
                     const std::vector<std::size_t>& thread_labels, double alpha);

// ---------------------------------------------------------------------------
// Multi-task thread pools

struct MultiTaskConfig {
  double alpha = 0.0;
  std::size_t k_t = 10;
  std::size_t thread_truncation = 5;
};

struct ThreadCandidatePool {
  std::size_t uoi = 0;
  // Earlier threads ordered by last activity (oldest first), each holding its
  // latest members ascending; the special {uoi} thread is always last.
  std::vector<std::vector<std::size_t>> threads;
  // Position of the UOI's thread; unset when that thread fell out of the pool.
  std::optional<std::size_t> label;

  std::size_t special_position() const { return threads.size() - 1; }
};

/// `partition` covers the whole log; only members before i are used.
ThreadCandidatePool build_thread_pool(const ThreadPartition& partition, std::size_t i,
                                      const MultiTaskConfig& config);

/// Per-thread inputs for the thread head: mean pair features (dimension x T)
/// and extras (2 x T).
struct ThreadInputs {
  Eigen::MatrixXd features;
  Eigen::MatrixXd extras;
};

ThreadInputs thread_features(const ChatLog& log, const ThreadCandidatePool& pool,
                             const FeatureConfig& config, const EmbeddingTable* table);

// ---------------------------------------------------------------------------
// Training

struct Example {
  Eigen::MatrixXd features;  // dimension x pool size
  std::size_t label = 0;
  struct Thread {
    ThreadInputs inputs;
    std::size_t label = 0;
  };
  std::optional<Thread> thread;
};

/// Featurized training instances for one log. Thread pools are attached when
/// `multitask` is given and the UOI's gold thread is in its pool.
std::vector<Example> make_examples(const ChatLog& log, const LinkSet& gold, std::size_t k_c,
                                   const FeatureConfig& config, const EmbeddingTable* table,
                                   const MultiTaskConfig* multitask = nullptr,
                                   std::size_t* discarded = nullptr);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  double eval_interval_epochs = 0.2;
  int patience = 3;
  int max_epochs = 10;
  std::size_t hidden = 512;
  std::uint64_t seed = 13;
};

struct TrainLogEntry {
  int evaluation = 0;
  long step = 0;
  double epoch = 0.0;
  double train_loss = 0.0;  // mean per-instance loss since the last evaluation
  double valid_recall1 = 0.0;

  bool operator==(const TrainLogEntry&) const = default;
};

struct TrainResult {
  MfModel model;
  std::vector<TrainLogEntry> log;
  int best_evaluation = 0;
  double best_recall1 = 0.0;
  bool stopped_early = false;
};

/// Adam on the reply loss (plus alpha * thread loss), evaluating validation
/// Recall@1 every `eval_interval_epochs` and keeping the best checkpoint.
TrainResult train_mf(const std::vector<Example>& train, const std::vector<Example>& valid,
                     std::size_t input_dim, const TrainConfig& config,
                     const MultiTaskConfig& multitask = {});

/// Fraction of examples whose argmax (ties to the most recent) is the label.
double recall_at_1(const MfModel& model, const std::vector<Example>& examples);

}  // namespace replymatch

#endif  // REPLYMATCH_SCORER_HPP_
