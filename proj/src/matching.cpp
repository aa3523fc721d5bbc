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

#include "replymatch/matching.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

#include "json.hpp"
#include "replymatch/decode.hpp"
#include "replymatch/metrics.hpp"

namespace replymatch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Residual network for successive shortest paths. Node 0 is the source,
// 1..L the left nodes, L+1..L+G the capacity groups, L+G+1 the sink.
class FlowNetwork {
 public:
  struct Arc {
    std::size_t to;
    std::size_t rev;
    int cap;
    double cost;
  };

  explicit FlowNetwork(std::size_t nodes) : adj_(nodes) {}

  std::size_t add_arc(std::size_t from, std::size_t to, int cap, double cost) {
    adj_[from].push_back({to, adj_[to].size(), cap, cost});
    adj_[to].push_back({from, adj_[from].size() - 1, 0, -cost});
    return adj_[from].size() - 1;
  }

  std::vector<Arc>& arcs(std::size_t node) { return adj_[node]; }
  const std::vector<Arc>& arcs(std::size_t node) const { return adj_[node]; }
  std::size_t size() const { return adj_.size(); }

  // Pushes unit flows along cheapest augmenting paths. `potential` must be
  // a feasible potential on entry. Stops when the sink is unreachable, when
  // `max_flow` units are sent, or (if `only_improving`) when the cheapest
  // path no longer has negative cost.
  int augment(std::size_t source, std::size_t sink, int max_flow, bool only_improving,
              double tolerance, std::vector<double>& potential) {
    const std::size_t n = adj_.size();
    std::vector<double> dist(n);
    std::vector<std::size_t> prev_node(n), prev_arc(n);
    int flow = 0;
    while (flow < max_flow) {
      std::fill(dist.begin(), dist.end(), kInf);
      dist[source] = 0.0;
      using Item = std::pair<double, std::size_t>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
      heap.push({0.0, source});
      while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (std::size_t a = 0; a < adj_[u].size(); ++a) {
          const Arc& arc = adj_[u][a];
          if (arc.cap <= 0) continue;
          const double reduced = std::max(0.0, arc.cost + potential[u] - potential[arc.to]);
          const double nd = d + reduced;
          if (nd < dist[arc.to]) {
            dist[arc.to] = nd;
            prev_node[arc.to] = u;
            prev_arc[arc.to] = a;
            heap.push({nd, arc.to});
          }
        }
      }
      if (dist[sink] == kInf) break;

      const double path_cost = dist[sink] + potential[sink] - potential[source];
      if (only_improving && path_cost >= -tolerance) break;

      double reach = 0.0;
      for (double d : dist) {
        if (d != kInf) reach = std::max(reach, d);
      }
      for (std::size_t v = 0; v < n; ++v) potential[v] += dist[v] == kInf ? reach : dist[v];

      for (std::size_t v = sink; v != source; v = prev_node[v]) {
        Arc& arc = adj_[prev_node[v]][prev_arc[v]];
        arc.cap -= 1;
        adj_[v][arc.rev].cap += 1;
      }
      ++flow;
    }
    return flow;
  }

 private:
  std::vector<std::vector<Arc>> adj_;
};

std::vector<std::string_view> nonempty_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

LinkEval bipartite_eval(const std::vector<ScoreMatrix>& matrices, const std::vector<LinkSet>& gold,
                        const FreqHeuristicParams& params) {
  std::size_t tp = 0, pred = 0, gold_count = 0;
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    const auto mass = score_mass(matrices[k]);
    const auto links =
        bipartite_links(matrices[k], estimate_freq_heuristic(mass, params)).links;
    const LinkEval e = link_prf(links, gold[k]);
    tp += e.true_positive;
    pred += e.predicted;
    gold_count += e.gold;
  }
  return link_prf_from_counts(tp, pred, gold_count);
}

double relu(double a) { return a > 0.0 ? a : 0.0; }
double relu_grad(double a) { return a > 0.0 ? 1.0 : 0.0; }

}  // namespace

long CapacityVector::total() const { return std::accumulate(delta.begin(), delta.end(), 0L); }

std::string format_capacities(const CapacityVector& capacities) {
  std::string out;
  for (std::size_t j = 0; j < capacities.size(); ++j) {
    out += std::to_string(j) + " " + std::to_string(capacities.delta[j]) + "\n";
  }
  return out;
}

CapacityVector parse_capacities(std::string_view text) {
  CapacityVector out;
  std::size_t line_no = 0;
  for (std::string_view line : nonempty_lines(text)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t space = line.find(' ');
    if (space == std::string_view::npos) throw ParseError("expected 'index count'", line_no);
    std::size_t index = 0;
    int count = 0;
    auto r1 = std::from_chars(line.data(), line.data() + space, index);
    auto r2 = std::from_chars(line.data() + space + 1, line.data() + line.size(), count);
    if (r1.ec != std::errc() || r1.ptr != line.data() + space || r2.ec != std::errc() ||
        r2.ptr != line.data() + line.size()) {
      throw ParseError("expected 'index count'", line_no);
    }
    if (index != out.delta.size()) throw ParseError("capacity indices must be 0, 1, 2, ...", line_no);
    if (count < 0) throw ParseError("negative capacity", line_no);
    out.delta.push_back(count);
  }
  return out;
}

std::size_t BipartiteGraph::right_node_count() const {
  std::size_t total = 0;
  for (const auto& g : groups) total += static_cast<std::size_t>(std::max(g.capacity, 0));
  return total;
}

std::vector<BipartiteGraph::RightNode> BipartiteGraph::right_nodes() const {
  std::vector<RightNode> nodes;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int c = 0; c < groups[g].capacity; ++c) nodes.push_back({g, c});
  }
  return nodes;
}

std::string format_match(const MatchResult& result, const BipartiteGraph& graph) {
  std::map<std::pair<std::size_t, std::size_t>, double> weight;
  for (const auto& e : graph.edges) weight[{e.left, graph.groups[e.group].candidate}] = e.weight;
  std::string out;
  for (std::size_t i = 0; i < result.assignment.size(); ++i) {
    if (!result.assignment[i]) continue;
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), weight[{i, *result.assignment[i]}]);
    out += std::to_string(i) + " " + std::to_string(*result.assignment[i]) + " " +
           std::string(buf, ptr) + "\n";
  }
  return out;
}

std::vector<double> score_mass(const ScoreMatrix& matrix) {
  std::size_t n = matrix.size();
  for (const auto& row : matrix.rows()) {
    for (std::size_t c : row.candidates) n = std::max(n, c + 1);
  }
  std::vector<double> mass(n, 0.0);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const auto& row = matrix[i];
    const auto p = matrix.probabilities(i);
    for (std::size_t k = 0; k < row.candidates.size(); ++k) mass[row.candidates[k]] += p[k];
  }
  return mass;
}

int round_capacity(double x) {
  const double r = std::round(x);
  return r > 0.0 ? static_cast<int>(r) : 0;
}

CapacityVector estimate_freq_heuristic(std::span<const double> mass,
                                       const FreqHeuristicParams& params) {
  CapacityVector out;
  out.delta.reserve(mass.size());
  for (double s : mass) out.delta.push_back(round_capacity(params.alpha * s + params.beta));
  return out;
}

CapacityVector oracle_capacities(const LinkSet& gold, std::size_t n, std::size_t k_c) {
  CapacityVector out;
  out.delta.assign(n, 0);
  for (const auto& link : resolve_latest_parents(gold, n, k_c)) ++out.delta[link.parent];
  return out;
}

BipartiteGraph build_bipartite(const ScoreMatrix& matrix, const CapacityVector& capacities) {
  BipartiteGraph graph;
  graph.left_count = matrix.size();
  std::vector<std::optional<std::size_t>> group_of(capacities.size());
  for (std::size_t j = 0; j < capacities.size(); ++j) {
    if (capacities.delta[j] > 0) {
      group_of[j] = graph.groups.size();
      graph.groups.push_back({j, capacities.delta[j]});
    }
  }
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const auto& row = matrix[i];
    for (std::size_t k = 0; k < row.candidates.size(); ++k) {
      const std::size_t j = row.candidates[k];
      if (j >= capacities.size()) {
        throw ValidationError("candidate " + std::to_string(j) + " has no capacity entry");
      }
      if (group_of[j]) graph.edges.push_back({i, *group_of[j], row.scores[k]});
    }
  }
  return graph;
}

MatchResult solve_matching(const BipartiteGraph& graph, MatchMode mode) {
  const std::size_t left = graph.left_count;
  const std::size_t groups = graph.groups.size();
  const std::size_t source = 0;
  const std::size_t sink = left + groups + 1;
  FlowNetwork net(left + groups + 2);

  double scale = 1.0;
  for (std::size_t i = 0; i < left; ++i) net.add_arc(source, 1 + i, 1, 0.0);
  std::vector<std::size_t> edge_arc(graph.edges.size());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    if (edge.left >= left || edge.group >= groups) {
      throw ValidationError("edge references a missing node");
    }
    if (!std::isfinite(edge.weight)) throw ValidationError("edge weight is not finite");
    scale = std::max(scale, std::abs(edge.weight));
    edge_arc[e] = net.add_arc(1 + edge.left, 1 + left + edge.group, 1, -edge.weight);
  }
  for (std::size_t g = 0; g < groups; ++g) {
    if (graph.groups[g].capacity > 0) {
      net.add_arc(1 + left + g, sink, graph.groups[g].capacity, 0.0);
    }
  }

  // Exact shortest distances of the initial (acyclic) network serve as the
  // first potential.
  std::vector<double> potential(net.size(), 0.0);
  std::vector<double> group_dist(groups, kInf);
  for (const auto& edge : graph.edges) {
    group_dist[edge.group] = std::min(group_dist[edge.group], -edge.weight);
  }
  double sink_dist = kInf;
  for (std::size_t g = 0; g < groups; ++g) {
    if (group_dist[g] == kInf) continue;
    potential[1 + left + g] = group_dist[g];
    if (graph.groups[g].capacity > 0) sink_dist = std::min(sink_dist, group_dist[g]);
  }
  potential[sink] = sink_dist == kInf ? 0.0 : sink_dist;

  const double tolerance = 1e-12 * scale;
  const int flow = net.augment(source, sink, static_cast<int>(left), mode == MatchMode::kRelaxed,
                               tolerance, potential);

  MatchResult result;
  result.assignment.assign(left, std::nullopt);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    if (net.arcs(1 + edge.left)[edge_arc[e]].cap == 0) {
      result.assignment[edge.left] = graph.groups[edge.group].candidate;
    }
  }
  // Summed per left node in index order so the total is independent of the
  // order in which paths were found.
  std::vector<double> matched_weight(left, 0.0);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    if (net.arcs(1 + edge.left)[edge_arc[e]].cap == 0) matched_weight[edge.left] = edge.weight;
  }
  for (std::size_t i = 0; i < left; ++i) {
    if (result.assignment[i]) {
      result.total_weight += matched_weight[i];
    } else {
      result.unmatched_left.push_back(i);
    }
  }
  result.feasible_strict = static_cast<std::size_t>(flow) == left;
  return result;
}

LinkSet complete_links(const MatchResult& result, const ScoreMatrix& matrix) {
  if (result.assignment.size() != matrix.size()) {
    throw ValidationError("match result and score matrix disagree on the number of UOIs");
  }
  LinkSet links;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const auto& row = matrix[i];
    if (result.assignment[i]) {
      links.add(row.uoi, *result.assignment[i]);
    } else {
      links.add(row.uoi, row.candidates.at(argmax_recent(row.scores)));
    }
  }
  return links;
}

BipartiteDecode bipartite_links(const ScoreMatrix& matrix, const CapacityVector& capacities,
                                MatchMode mode) {
  const BipartiteGraph graph = build_bipartite(matrix, capacities);
  BipartiteDecode out;
  out.match = solve_matching(graph, mode);
  out.links = complete_links(out.match, matrix);
  return out;
}

ThreadPartition bipartite_decode(const ScoreMatrix& matrix, const CapacityVector& capacities) {
  return threads_from_links(bipartite_links(matrix, capacities).links, matrix.size());
}

// ---------------------------------------------------------------------------

HeuristicGrid HeuristicGrid::standard() {
  return {{0.9, 1.1, 1.3, 1.5, 1.7, 1.9}, {0.1, 0.2, 0.3, 0.4, 0.5}};
}

SweepResult sweep_heuristic(const std::vector<ScoreMatrix>& matrices,
                            const std::vector<LinkSet>& gold, const HeuristicGrid& grid) {
  if (grid.alphas.empty() || grid.betas.empty()) throw ValidationError("empty parameter grid");
  if (matrices.size() != gold.size()) {
    throw ValidationError("one gold link set per score matrix required");
  }
  std::vector<double> alphas = grid.alphas;
  std::vector<double> betas = grid.betas;
  std::sort(alphas.begin(), alphas.end());
  std::sort(betas.begin(), betas.end());

  SweepResult result;
  bool have_best = false;
  for (double alpha : alphas) {
    for (double beta : betas) {
      const FreqHeuristicParams params{alpha, beta};
      const double f1 = bipartite_eval(matrices, gold, params).f1;
      result.points.push_back({params, f1});
      if (!have_best || f1 > result.best_f1) {
        result.best = params;
        result.best_f1 = f1;
        have_best = true;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd regressor_inputs(const ScoreMatrix& matrix, std::size_t k_c) {
  const auto n = static_cast<Eigen::Index>(matrix.size());
  const auto dim = static_cast<Eigen::Index>(k_c + 1);
  Eigen::MatrixXd inputs = Eigen::MatrixXd::Zero(dim, n);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const auto& row = matrix[i];
    const auto p = matrix.probabilities(i);
    for (std::size_t k = 0; k < row.candidates.size(); ++k) {
      const std::size_t j = row.candidates[k];
      if (j >= matrix.size()) continue;
      const std::size_t slot = row.uoi - j;
      if (slot < k_c) inputs(static_cast<Eigen::Index>(slot), static_cast<Eigen::Index>(j)) = p[k];
      inputs(dim - 1, static_cast<Eigen::Index>(j)) += p[k];
    }
  }
  return inputs;
}

FreqRegressor::FreqRegressor(std::size_t k_c, std::size_t hidden) : k_c_(k_c), hidden_(hidden) {
  if (k_c == 0 || hidden == 0) throw ValidationError("regressor dimensions must be positive");
  const auto d = static_cast<Eigen::Index>(k_c + 1);
  const auto h = static_cast<Eigen::Index>(hidden);
  nn::ParameterLayout layout;
  w1_ = layout.add(h, d);
  b1_ = layout.add(h);
  w2_ = layout.add(h, h);
  b2_ = layout.add(h);
  w3_ = layout.add(1, h);
  b3_ = layout.add(1);
  params_ = Eigen::VectorXd::Zero(layout.total());
}

void FreqRegressor::initialize(std::uint64_t seed) {
  Rng rng(seed);
  params_.setZero();
  nn::xavier_uniform(params_, w1_, rng);
  nn::xavier_uniform(params_, w2_, rng);
  nn::xavier_uniform(params_, w3_, rng);
}

Eigen::VectorXd FreqRegressor::predict(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != static_cast<Eigen::Index>(input_dim())) {
    throw ValidationError("regressor input has " + std::to_string(inputs.rows()) +
                          " rows, expected " + std::to_string(input_dim()));
  }
  const Eigen::MatrixXd h1 =
      ((nn::view(params_, w1_) * inputs).colwise() + nn::view(params_, b1_).col(0))
          .unaryExpr(&relu);
  const Eigen::MatrixXd h2 =
      ((nn::view(params_, w2_) * h1).colwise() + nn::view(params_, b2_).col(0)).unaryExpr(&relu);
  Eigen::VectorXd out = (nn::view(params_, w3_) * h2).transpose();
  out.array() += params_[b3_.offset];
  return out;
}

double FreqRegressor::mse(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                          Eigen::VectorXd* grad) const {
  if (inputs.cols() != targets.size()) throw ValidationError("one target per input column");
  if (inputs.cols() == 0) return 0.0;
  if (inputs.rows() != static_cast<Eigen::Index>(input_dim())) {
    throw ValidationError("regressor input has the wrong dimension");
  }
  const Eigen::MatrixXd pre1 =
      (nn::view(params_, w1_) * inputs).colwise() + nn::view(params_, b1_).col(0);
  const Eigen::MatrixXd h1 = pre1.unaryExpr(&relu);
  const Eigen::MatrixXd pre2 = (nn::view(params_, w2_) * h1).colwise() + nn::view(params_, b2_).col(0);
  const Eigen::MatrixXd h2 = pre2.unaryExpr(&relu);
  Eigen::VectorXd out = (nn::view(params_, w3_) * h2).transpose();
  out.array() += params_[b3_.offset];
  const Eigen::VectorXd err = out - targets;
  const double m = static_cast<double>(targets.size());
  if (grad != nullptr) {
    const Eigen::RowVectorXd dout = (2.0 / m) * err.transpose();
    nn::view(*grad, w3_).noalias() += dout * h2.transpose();
    (*grad)[b3_.offset] += dout.sum();
    const Eigen::MatrixXd dpre2 = (nn::view(params_, w3_).transpose() * dout)
                                      .cwiseProduct(pre2.unaryExpr(&relu_grad));
    nn::view(*grad, w2_).noalias() += dpre2 * h1.transpose();
    nn::view(*grad, b2_) += dpre2.rowwise().sum();
    const Eigen::MatrixXd dpre1 =
        (nn::view(params_, w2_).transpose() * dpre2).cwiseProduct(pre1.unaryExpr(&relu_grad));
    nn::view(*grad, w1_).noalias() += dpre1 * inputs.transpose();
    nn::view(*grad, b1_) += dpre1.rowwise().sum();
  }
  return err.squaredNorm() / m;
}

std::string FreqRegressor::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "replymatch-freq-regressor";
  j["k_c"] = k_c_;
  j["hidden"] = hidden_;
  j["params"] = std::vector<double>(params_.data(), params_.data() + params_.size());
  return j.dump();
}

FreqRegressor FreqRegressor::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "replymatch-freq-regressor") {
      throw ValidationError("not a capacity regressor file");
    }
    FreqRegressor model(j.at("k_c").get<std::size_t>(), j.at("hidden").get<std::size_t>());
    const auto params = j.at("params").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(params.size()) != model.params_.size()) {
      throw ValidationError("regressor file has the wrong number of parameters");
    }
    model.params_ = Eigen::Map<const Eigen::VectorXd>(params.data(), model.params_.size());
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("regressor file: ") + e.what(), 0);
  }
}

RegressorTrainResult train_freq_regressor(const Eigen::MatrixXd& inputs,
                                          const Eigen::VectorXd& targets, std::size_t k_c,
                                          const RegressorTrainConfig& config,
                                          const Eigen::MatrixXd& valid_inputs,
                                          const Eigen::VectorXd& valid_targets) {
  if (inputs.cols() == 0) throw ValidationError("no regression samples");
  if (inputs.cols() != targets.size()) throw ValidationError("one target per sample required");
  if (config.batch_size == 0 || config.epochs <= 0) {
    throw ValidationError("batch size and epochs must be positive");
  }
  const bool validate = valid_inputs.cols() > 0;

  RegressorTrainResult result;
  FreqRegressor model(k_c, config.hidden);
  model.initialize(config.seed);
  nn::Adam adam(model.params().size(), {config.learning_rate});
  Rng rng(config.seed ^ 0xd1b54a32d192ed03ULL);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(inputs.cols()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::VectorXd best = model.params();
  double best_valid = kInf;
  Eigen::VectorXd grad(model.params().size());

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const auto count = static_cast<Eigen::Index>(stop - start);
      Eigen::MatrixXd batch(inputs.rows(), count);
      Eigen::VectorXd batch_targets(count);
      for (Eigen::Index k = 0; k < count; ++k) {
        batch.col(k) = inputs.col(order[start + static_cast<std::size_t>(k)]);
        batch_targets[k] = targets[order[start + static_cast<std::size_t>(k)]];
      }
      grad.setZero();
      model.mse(batch, batch_targets, &grad);
      adam.step(model.params(), grad);
    }
    result.train_mse.push_back(model.mse(inputs, targets));
    if (validate) {
      const double v = model.mse(valid_inputs, valid_targets);
      result.valid_mse.push_back(v);
      if (v < best_valid) {
        best_valid = v;
        best = model.params();
        result.best_epoch = epoch;
      }
    }
  }
  if (validate) {
    model.params() = best;
  } else {
    result.best_epoch = config.epochs;
  }
  result.model = std::move(model);
  return result;
}

void regressor_dataset(const std::vector<ScoreMatrix>& matrices, const std::vector<LinkSet>& gold,
                       std::size_t k_c, Eigen::MatrixXd& inputs, Eigen::VectorXd& targets) {
  if (matrices.size() != gold.size()) {
    throw ValidationError("one gold link set per score matrix required");
  }
  Eigen::Index total = 0;
  for (const auto& m : matrices) total += static_cast<Eigen::Index>(m.size());
  inputs.resize(static_cast<Eigen::Index>(k_c + 1), total);
  targets.resize(total);
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    const auto n = static_cast<Eigen::Index>(matrices[k].size());
    inputs.middleCols(col, n) = regressor_inputs(matrices[k], k_c);
    const auto oracle = oracle_capacities(gold[k], matrices[k].size(), k_c);
    for (Eigen::Index j = 0; j < n; ++j) {
      targets[col + j] = oracle.delta[static_cast<std::size_t>(j)];
    }
    col += n;
  }
}

CapacityVector estimate_freq_regressor(const FreqRegressor& model, const ScoreMatrix& matrix) {
  const Eigen::VectorXd predictions = model.predict(regressor_inputs(matrix, model.k_c()));
  CapacityVector out;
  out.delta.reserve(static_cast<std::size_t>(predictions.size()));
  for (Eigen::Index j = 0; j < predictions.size(); ++j) {
    out.delta.push_back(round_capacity(predictions[j]));
  }
  return out;
}

}  // namespace replymatch
