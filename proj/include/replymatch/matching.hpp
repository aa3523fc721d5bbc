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

// Global decoding of reply-to links as capacity-constrained maximum-weight
// bipartite matching.
//
// Left nodes are UOIs. Each candidate utterance u_j appears on the right as
// delta(j) interchangeable copies, so it can absorb at most delta(j) replies.
// An edge joins UOI i to every copy of each candidate j in its pool with
// delta(j) > 0, weighted by the raw relevance score r_ij. Two programs are
// supported:
//
//   strict   every UOI matched exactly once (may be infeasible)
//   relaxed  every UOI matched at most once
//
// Both are solved exactly by successive shortest paths on the equivalent
// min-cost flow network, where the copies of a candidate collapse into one
// node with capacity delta(j).
//
// Capacities come from ground truth (oracle), from the softmax score mass a
// candidate collects (heuristic), or from a small regression network.

#ifndef REPLYMATCH_MATCHING_HPP_
#define REPLYMATCH_MATCHING_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "replymatch/corpus.hpp"
#include "replymatch/nn.hpp"
#include "replymatch/scorer.hpp"

namespace replymatch {

/// Reply capacity per utterance index.
struct CapacityVector {
  std::vector<int> delta;

  std::size_t size() const { return delta.size(); }
  long total() const;

  bool operator==(const CapacityVector&) const = default;
};

/// `index count` per line.
std::string format_capacities(const CapacityVector& capacities);
CapacityVector parse_capacities(std::string_view text);

struct RightGroup {
  std::size_t candidate = 0;  // utterance index (or any caller-defined id)
  int capacity = 0;           // number of duplicate right nodes
};

struct BipartiteEdge {
  std::size_t left = 0;
  std::size_t group = 0;  // index into BipartiteGraph::groups
  double weight = 0.0;
};

struct BipartiteGraph {
  std::size_t left_count = 0;
  std::vector<RightGroup> groups;
  // One entry per (left, group); it stands for the edges to every copy.
  std::vector<BipartiteEdge> edges;

  /// Total number of duplicated right nodes (sum of capacities).
  std::size_t right_node_count() const;

  struct RightNode {
    std::size_t group = 0;
    int copy = 0;
  };
  /// Explicit duplicates, group-major.
  std::vector<RightNode> right_nodes() const;
};

enum class MatchMode { kStrict, kRelaxed };

struct MatchResult {
  // Left index -> matched group's candidate id.
  std::vector<std::optional<std::size_t>> assignment;
  double total_weight = 0.0;
  std::vector<std::size_t> unmatched_left;
  // Strict mode: whether every left node could be matched. Relaxed mode:
  // whether the optimum happens to match every left node.
  bool feasible_strict = false;
};

/// `left candidate weight` per matched edge.
std::string format_match(const MatchResult& result, const BipartiteGraph& graph);

/// Softmax each row, then sum the probability each candidate receives.
std::vector<double> score_mass(const ScoreMatrix& matrix);

struct FreqHeuristicParams {
  double alpha = 1.3;
  double beta = 0.2;

  bool operator==(const FreqHeuristicParams&) const = default;
};

/// max(0, x rounded half away from zero).
int round_capacity(double x);

/// delta(j) = round_capacity(alpha * S_j + beta).
CapacityVector estimate_freq_heuristic(std::span<const double> mass,
                                       const FreqHeuristicParams& params);

/// Capacities from gold links after resolving each UOI to its latest
/// in-window parent. Self-links count towards the UOI's own capacity.
CapacityVector oracle_capacities(const LinkSet& gold, std::size_t n, std::size_t k_c);

BipartiteGraph build_bipartite(const ScoreMatrix& matrix, const CapacityVector& capacities);

MatchResult solve_matching(const BipartiteGraph& graph, MatchMode mode);

/// Matched UOIs keep their match; the rest take their row's argmax.
LinkSet complete_links(const MatchResult& result, const ScoreMatrix& matrix);

struct BipartiteDecode {
  LinkSet links;
  MatchResult match;
};

BipartiteDecode bipartite_links(const ScoreMatrix& matrix, const CapacityVector& capacities,
                                MatchMode mode = MatchMode::kRelaxed);

ThreadPartition bipartite_decode(const ScoreMatrix& matrix, const CapacityVector& capacities);

// ---------------------------------------------------------------------------
// Heuristic grid search

struct HeuristicGrid {
  std::vector<double> alphas;
  std::vector<double> betas;

  /// alpha in {0.9, 1.1, ..., 1.9}, beta in {0.1, ..., 0.5}.
  static HeuristicGrid standard();
  std::size_t size() const { return alphas.size() * betas.size(); }
};

struct SweepPoint {
  FreqHeuristicParams params;
  double f1 = 0.0;
};

struct SweepResult {
  FreqHeuristicParams best;
  double best_f1 = 0.0;
  std::vector<SweepPoint> points;  // in evaluation order
};

/// Maximizes micro-averaged link F1 of the relaxed bipartite decode.
/// Points are visited in ascending (alpha, beta) order and only a strictly
/// better F1 replaces the incumbent. Throws ValidationError on an empty grid.
SweepResult sweep_heuristic(const std::vector<ScoreMatrix>& matrices,
                            const std::vector<LinkSet>& gold, const HeuristicGrid& grid);

// ---------------------------------------------------------------------------
// Capacity regressor

/// Input column for candidate j (length k_c + 1): slot p holds the softmax
/// probability UOI j + p assigns to j (0 when absent), the last slot is S_j.
Eigen::MatrixXd regressor_inputs(const ScoreMatrix& matrix, std::size_t k_c);

/// Two ReLU layers and a linear scalar output.
class FreqRegressor {
 public:
  FreqRegressor() = default;
  FreqRegressor(std::size_t k_c, std::size_t hidden);

  void initialize(std::uint64_t seed);

  std::size_t k_c() const { return k_c_; }
  std::size_t input_dim() const { return k_c_ + 1; }
  std::size_t hidden() const { return hidden_; }
  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  Eigen::VectorXd predict(const Eigen::MatrixXd& inputs) const;

  /// Mean squared error over columns; adds its gradient to `grad` if given.
  double mse(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
             Eigen::VectorXd* grad = nullptr) const;

  std::string to_json() const;
  static FreqRegressor from_json(std::string_view text);

 private:
  std::size_t k_c_ = 0;
  std::size_t hidden_ = 0;
  nn::Slot w1_, b1_, w2_, b2_, w3_, b3_;
  Eigen::VectorXd params_;
};

struct RegressorTrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  int epochs = 200;
  std::size_t hidden = 128;
  std::uint64_t seed = 17;
};

struct RegressorTrainResult {
  FreqRegressor model;
  std::vector<double> train_mse;  // per epoch
  std::vector<double> valid_mse;  // per epoch, empty without validation data
  int best_epoch = 0;             // 1-based; last epoch without validation data
};

/// Columns of `inputs` are samples. The validation set, when non-empty,
/// selects the epoch with the lowest MSE.
RegressorTrainResult train_freq_regressor(const Eigen::MatrixXd& inputs,
                                          const Eigen::VectorXd& targets, std::size_t k_c,
                                          const RegressorTrainConfig& config,
                                          const Eigen::MatrixXd& valid_inputs = {},
                                          const Eigen::VectorXd& valid_targets = {});

/// Builds samples (one per utterance) from scored logs with oracle targets.
void regressor_dataset(const std::vector<ScoreMatrix>& matrices, const std::vector<LinkSet>& gold,
                       std::size_t k_c, Eigen::MatrixXd& inputs, Eigen::VectorXd& targets);

CapacityVector estimate_freq_regressor(const FreqRegressor& model, const ScoreMatrix& matrix);

}  // namespace replymatch

#endif  // REPLYMATCH_MATCHING_HPP_
