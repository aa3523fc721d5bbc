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

#include "replymatch/scorer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include "json.hpp"

namespace replymatch {
namespace {

constexpr double kThreadSizeScale = 5.0;

double log_sum_exp(std::span<const double> scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - top);
  return top + std::log(sum);
}

// Cross-entropy of one row; writes p - onehot into `grad`.
double row_cross_entropy(std::span<const double> row, std::size_t label,
                         std::vector<double>* grad) {
  if (row.empty()) throw ValidationError("empty score row");
  if (label >= row.size()) throw ValidationError("label outside its score row");
  const double lse = log_sum_exp(row);
  if (grad != nullptr) {
    grad->resize(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) (*grad)[k] = std::exp(row[k] - lse);
    (*grad)[label] -= 1.0;
  }
  return lse - row[label];
}

void append_number(std::string& out, double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = s.find(sep, start);
    parts.push_back(s.substr(start, end == std::string_view::npos ? s.npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

template <typename T>
std::vector<T> parse_numbers(std::string_view field, std::size_t line_no) {
  std::vector<T> values;
  for (std::string_view part : split_on(field, ' ')) {
    if (part.empty()) continue;
    T value{};
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      throw ParseError("bad number '" + std::string(part) + "'", line_no);
    }
    values.push_back(value);
  }
  return values;
}

}  // namespace

CandidatePool build_candidate_pool(std::size_t i, std::size_t k_c) {
  if (k_c == 0) throw ValidationError("candidate window must be positive");
  CandidatePool pool;
  pool.uoi = i;
  pool.k_c = k_c;
  const std::size_t first = i + 1 >= k_c ? i + 1 - k_c : 0;
  for (std::size_t j = first; j <= i; ++j) pool.candidates.push_back(j);
  return pool;
}

TrainingSet build_training_instances(const ChatLog& log, const LinkSet& gold, std::size_t k_c) {
  TrainingSet set;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto parents = gold.parents_of(i);
    if (parents.empty()) continue;
    CandidatePool pool = build_candidate_pool(i, k_c);
    const std::size_t first = pool.candidates.front();
    std::optional<std::size_t> latest;
    for (std::size_t p : parents) {
      if (p >= first) latest = p;
    }
    if (!latest) {
      ++set.discarded;
      continue;
    }
    set.instances.push_back({std::move(pool), *latest - first});
  }
  return set;
}

std::size_t last_mention_predict(const ChatLog& log, std::size_t i) {
  const auto& mentioned = log[i].mentioned_users;
  if (!mentioned.empty()) {
    for (std::size_t j = i; j-- > 0;) {
      if (mentioned.contains(log[j].speaker)) return j;
    }
  }
  return i > 0 ? i - 1 : i;
}

LinkSet last_mention_links(const ChatLog& log) {
  LinkSet links;
  for (std::size_t i = 0; i < log.size(); ++i) links.add(i, last_mention_predict(log, i));
  return links;
}

// ---------------------------------------------------------------------------

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> p(scores.size());
  if (scores.empty()) return p;
  const double lse = log_sum_exp(scores);
  for (std::size_t k = 0; k < scores.size(); ++k) p[k] = std::exp(scores[k] - lse);
  return p;
}

std::size_t argmax_recent(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("argmax of an empty score row");
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] >= scores[best]) best = k;
  }
  return best;
}

std::vector<double> ScoreMatrix::probabilities(std::size_t i) const {
  return softmax(rows_[i].scores);
}

void ScoreMatrix::validate(std::size_t n, std::optional<std::size_t> k_c) const {
  if (rows_.size() != n) {
    throw ValidationError("score matrix has " + std::to_string(rows_.size()) +
                          " rows, log has " + std::to_string(n) + " utterances");
  }
  std::size_t window = k_c.value_or(0);
  if (!k_c) {
    for (const auto& row : rows_) window = std::max(window, row.candidates.size());
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const ScoreRow& row = rows_[i];
    const std::string where = "score row " + std::to_string(i) + ": ";
    if (row.uoi != i) throw ValidationError(where + "uoi is " + std::to_string(row.uoi));
    if (row.candidates.size() != row.scores.size()) {
      throw ValidationError(where + "candidate and score counts differ");
    }
    if (row.candidates != build_candidate_pool(i, std::max<std::size_t>(window, 1)).candidates) {
      throw ValidationError(where + "candidates do not match the window of size " +
                            std::to_string(window));
    }
    for (double s : row.scores) {
      if (!std::isfinite(s)) throw ValidationError(where + "non-finite score");
    }
  }
}

std::string export_scores(const ScoreMatrix& matrix) {
  std::string out = "# uoi\tcandidates\tscores\n";
  for (const auto& row : matrix.rows()) {
    out += std::to_string(row.uoi);
    out += '\t';
    for (std::size_t k = 0; k < row.candidates.size(); ++k) {
      if (k > 0) out += ' ';
      out += std::to_string(row.candidates[k]);
    }
    out += '\t';
    for (std::size_t k = 0; k < row.scores.size(); ++k) {
      if (k > 0) out += ' ';
      append_number(out, row.scores[k]);
    }
    out += '\n';
  }
  return out;
}

ScoreMatrix import_scores(std::string_view text) {
  std::vector<ScoreRow> rows;
  std::size_t line_no = 0;
  for (std::string_view line : split_on(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_on(line, '\t');
    if (fields.size() != 3) throw ParseError("expected 3 tab-separated fields", line_no);
    ScoreRow row;
    const auto uoi = parse_numbers<std::size_t>(fields[0], line_no);
    if (uoi.size() != 1) throw ParseError("expected one uoi index", line_no);
    row.uoi = uoi.front();
    row.candidates = parse_numbers<std::size_t>(fields[1], line_no);
    row.scores = parse_numbers<double>(fields[2], line_no);
    if (row.candidates.size() != row.scores.size()) {
      throw ParseError(std::to_string(row.candidates.size()) + " candidates but " +
                           std::to_string(row.scores.size()) + " scores",
                       line_no);
    }
    rows.push_back(std::move(row));
  }
  return ScoreMatrix(std::move(rows));
}

// ---------------------------------------------------------------------------

MfModel::MfModel(std::size_t input_dim, std::size_t hidden)
    : input_dim_(input_dim), hidden_(hidden) {
  if (input_dim == 0 || hidden == 0) throw ValidationError("model dimensions must be positive");
  const auto d = static_cast<Eigen::Index>(input_dim);
  const auto h = static_cast<Eigen::Index>(hidden);
  nn::ParameterLayout layout;
  w1_ = layout.add(h, d);
  b1_ = layout.add(h);
  w2_ = layout.add(h, h);
  b2_ = layout.add(h);
  thread_w_ = layout.add(h);
  thread_u_ = layout.add(kThreadExtras);
  thread_c_ = layout.add(1);
  params_ = Eigen::VectorXd::Zero(layout.total());
}

void MfModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  params_.setZero();
  nn::xavier_uniform(params_, w1_, rng);
  nn::xavier_uniform(params_, w2_, rng);
  nn::xavier_uniform(params_, thread_w_, rng);
}

MfModel::Trunk MfModel::forward(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != static_cast<Eigen::Index>(input_dim_)) {
    throw ValidationError("feature dimension " + std::to_string(inputs.rows()) +
                          " does not match model input " + std::to_string(input_dim_));
  }
  Trunk t;
  t.pre1 = (nn::view(params_, w1_) * inputs).colwise() + nn::view(params_, b1_).col(0);
  t.act1 = t.pre1.unaryExpr(&nn::softsign);
  t.pre2 = (nn::view(params_, w2_) * t.act1).colwise() + nn::view(params_, b2_).col(0);
  t.act2 = t.pre2.unaryExpr(&nn::softsign);
  return t;
}

Eigen::VectorXd MfModel::reply_scores(const Trunk& trunk) const {
  return trunk.act2.colwise().sum().transpose();
}

Eigen::VectorXd MfModel::thread_scores(const Trunk& trunk, const Eigen::MatrixXd& extras) const {
  Eigen::VectorXd s = trunk.act2.transpose() * nn::view(params_, thread_w_).col(0) +
                      extras.transpose() * nn::view(params_, thread_u_).col(0);
  s.array() += params_[thread_c_.offset];
  return s;
}

void MfModel::backward_trunk(const Eigen::MatrixXd& inputs, const Trunk& trunk,
                             const Eigen::MatrixXd& dact2, Eigen::VectorXd& grad) const {
  const Eigen::MatrixXd dpre2 =
      dact2.cwiseProduct(trunk.pre2.unaryExpr(&nn::softsign_grad));
  nn::view(grad, w2_).noalias() += dpre2 * trunk.act1.transpose();
  nn::view(grad, b2_) += dpre2.rowwise().sum();
  const Eigen::MatrixXd dact1 = nn::view(params_, w2_).transpose() * dpre2;
  const Eigen::MatrixXd dpre1 = dact1.cwiseProduct(trunk.pre1.unaryExpr(&nn::softsign_grad));
  nn::view(grad, w1_).noalias() += dpre1 * inputs.transpose();
  nn::view(grad, b1_) += dpre1.rowwise().sum();
}

void MfModel::backward_reply(const Eigen::MatrixXd& inputs, const Trunk& trunk,
                             const Eigen::VectorXd& dscores, Eigen::VectorXd& grad) const {
  const Eigen::MatrixXd dact2 =
      Eigen::VectorXd::Ones(static_cast<Eigen::Index>(hidden_)) * dscores.transpose();
  backward_trunk(inputs, trunk, dact2, grad);
}

void MfModel::backward_thread(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& extras,
                              const Trunk& trunk, const Eigen::VectorXd& dscores,
                              Eigen::VectorXd& grad) const {
  nn::view(grad, thread_w_) += trunk.act2 * dscores;
  nn::view(grad, thread_u_) += extras * dscores;
  grad[thread_c_.offset] += dscores.sum();
  const Eigen::MatrixXd dact2 = nn::view(params_, thread_w_).col(0) * dscores.transpose();
  backward_trunk(inputs, trunk, dact2, grad);
}

std::string MfModel::to_json(const FeatureConfig& features) const {
  nlohmann::ordered_json j;
  j["format"] = "replymatch-mf";
  j["input_dim"] = input_dim_;
  j["hidden"] = hidden_;
  j["use_embeddings"] = features.use_embeddings;
  j["embedding_dim"] = features.embedding_dim;
  j["params"] = std::vector<double>(params_.data(), params_.data() + params_.size());
  return j.dump();
}

MfModel MfModel::from_json(std::string_view text, FeatureConfig* features) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model file: ") + e.what(), 0);
  }
  try {
    if (j.at("format").get<std::string>() != "replymatch-mf") {
      throw ValidationError("not an MF model file");
    }
    MfModel model(j.at("input_dim").get<std::size_t>(), j.at("hidden").get<std::size_t>());
    const auto params = j.at("params").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(params.size()) != model.params_.size()) {
      throw ValidationError("model file has " + std::to_string(params.size()) +
                            " parameters, expected " + std::to_string(model.params_.size()));
    }
    model.params_ = Eigen::Map<const Eigen::VectorXd>(params.data(), model.params_.size());
    if (features != nullptr) {
      features->use_embeddings = j.at("use_embeddings").get<bool>();
      features->embedding_dim = j.at("embedding_dim").get<std::size_t>();
      if (features->dimension() != model.input_dim()) {
        throw ValidationError("model feature configuration does not match its input size");
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what(), 0);
  }
}

double mf_score(const MfModel& model, std::span<const double> features) {
  if (features.size() != model.input_dim()) {
    throw ValidationError("feature dimension " + std::to_string(features.size()) +
                          " does not match model input " + std::to_string(model.input_dim()));
  }
  const Eigen::MatrixXd column =
      Eigen::Map<const Eigen::VectorXd>(features.data(), static_cast<Eigen::Index>(features.size()));
  return model.reply_scores(model.forward(column))[0];
}

Eigen::MatrixXd pool_features(const ChatLog& log, const CandidatePool& pool,
                              const FeatureConfig& config, const EmbeddingTable* table) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(config.dimension()),
                      static_cast<Eigen::Index>(pool.candidates.size()));
  for (std::size_t k = 0; k < pool.candidates.size(); ++k) {
    const auto v = pair_features(log, pool.uoi, pool.candidates[k], config, table);
    out.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  return out;
}

ScoreMatrix score_log(const MfModel& model, const ChatLog& log, std::size_t k_c,
                      const FeatureConfig& config, const EmbeddingTable* table) {
  if (config.dimension() != model.input_dim()) {
    throw ValidationError("feature configuration dimension " +
                          std::to_string(config.dimension()) + " does not match model input " +
                          std::to_string(model.input_dim()));
  }
  std::vector<ScoreRow> rows;
  rows.reserve(log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    CandidatePool pool = build_candidate_pool(i, k_c);
    const Eigen::VectorXd scores =
        model.reply_scores(model.forward(pool_features(log, pool, config, table)));
    rows.push_back({i, std::move(pool.candidates),
                    std::vector<double>(scores.data(), scores.data() + scores.size())});
  }
  return ScoreMatrix(std::move(rows));
}

// ---------------------------------------------------------------------------

RowLoss loss_reply(const std::vector<std::vector<double>>& rows,
                   const std::vector<std::size_t>& labels) {
  if (rows.size() != labels.size()) throw ValidationError("one label per row required");
  RowLoss out;
  out.grads.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.loss += row_cross_entropy(rows[r], labels[r], &out.grads[r]);
  }
  return out;
}

JointLoss loss_joint(const std::vector<std::vector<double>>& reply_rows,
                     const std::vector<std::size_t>& reply_labels,
                     const std::vector<std::vector<double>>& thread_rows,
                     const std::vector<std::size_t>& thread_labels, double alpha) {
  if (alpha < 0.0) throw ValidationError("thread loss weight must be non-negative");
  RowLoss reply = loss_reply(reply_rows, reply_labels);
  RowLoss thread = loss_reply(thread_rows, thread_labels);
  JointLoss out;
  out.reply = reply.loss;
  out.thread = thread.loss;
  out.total = alpha == 0.0 ? reply.loss : reply.loss + alpha * thread.loss;
  out.reply_grads = std::move(reply.grads);
  out.thread_grads = std::move(thread.grads);
  for (auto& row : out.thread_grads) {
    for (double& g : row) g *= alpha;
  }
  return out;
}

// ---------------------------------------------------------------------------

ThreadCandidatePool build_thread_pool(const ThreadPartition& partition, std::size_t i,
                                      const MultiTaskConfig& config) {
  if (i >= partition.size()) throw ValidationError("UOI outside the partition");
  if (config.k_t == 0) throw ValidationError("thread pool size must be positive");

  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t j = 0; j < i; ++j) members[partition.thread_of(j)].push_back(j);

  std::vector<std::pair<std::size_t, std::size_t>> by_activity;  // (last member, thread id)
  for (const auto& [id, list] : members) by_activity.emplace_back(list.back(), id);
  std::sort(by_activity.begin(), by_activity.end(), std::greater<>());
  if (by_activity.size() > config.k_t - 1) by_activity.resize(config.k_t - 1);
  std::reverse(by_activity.begin(), by_activity.end());

  ThreadCandidatePool pool;
  pool.uoi = i;
  const std::size_t own_thread = partition.thread_of(i);
  for (const auto& [last, id] : by_activity) {
    const auto& list = members[id];
    const std::size_t keep = std::min(list.size(), config.thread_truncation);
    pool.threads.emplace_back(list.end() - static_cast<std::ptrdiff_t>(keep), list.end());
    if (id == own_thread) pool.label = pool.threads.size() - 1;
  }
  pool.threads.push_back({i});
  if (!members.contains(own_thread)) pool.label = pool.special_position();
  return pool;
}

ThreadInputs thread_features(const ChatLog& log, const ThreadCandidatePool& pool,
                             const FeatureConfig& config, const EmbeddingTable* table) {
  const auto d = static_cast<Eigen::Index>(config.dimension());
  const auto t = static_cast<Eigen::Index>(pool.threads.size());
  ThreadInputs out{Eigen::MatrixXd::Zero(d, t), Eigen::MatrixXd::Zero(MfModel::kThreadExtras, t)};
  for (Eigen::Index k = 0; k < t; ++k) {
    const auto& thread = pool.threads[static_cast<std::size_t>(k)];
    for (std::size_t m : thread) {
      const auto v = pair_features(log, pool.uoi, m, config, table);
      out.features.col(k) += Eigen::Map<const Eigen::VectorXd>(v.data(), d);
    }
    out.features.col(k) /= static_cast<double>(thread.size());
    out.extras(0, k) = static_cast<double>(thread.size()) / kThreadSizeScale;
    out.extras(1, k) = static_cast<double>(pool.uoi - thread.back()) / 100.0;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Example> make_examples(const ChatLog& log, const LinkSet& gold, std::size_t k_c,
                                   const FeatureConfig& config, const EmbeddingTable* table,
                                   const MultiTaskConfig* multitask, std::size_t* discarded) {
  const TrainingSet set = build_training_instances(log, gold, k_c);
  if (discarded != nullptr) *discarded += set.discarded;
  std::optional<ThreadPartition> partition;
  if (multitask != nullptr) {
    partition = threads_from_links(resolve_latest_parents(gold, log.size(), k_c), log.size());
  }
  std::vector<Example> examples;
  examples.reserve(set.instances.size());
  for (const auto& instance : set.instances) {
    Example ex;
    ex.features = pool_features(log, instance.pool, config, table);
    ex.label = instance.label;
    if (partition) {
      const auto pool = build_thread_pool(*partition, instance.pool.uoi, *multitask);
      if (pool.label) ex.thread = Example::Thread{thread_features(log, pool, config, table), *pool.label};
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

double recall_at_1(const MfModel& model, const std::vector<Example>& examples) {
  if (examples.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& ex : examples) {
    const Eigen::VectorXd scores = model.reply_scores(model.forward(ex.features));
    if (argmax_recent(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size()))) == ex.label) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

TrainResult train_mf(const std::vector<Example>& train, const std::vector<Example>& valid,
                     std::size_t input_dim, const TrainConfig& config,
                     const MultiTaskConfig& multitask) {
  if (train.empty()) throw ValidationError("no training instances");
  if (valid.empty()) throw ValidationError("no validation instances");
  if (config.learning_rate <= 0.0) throw ValidationError("learning rate must be positive");
  if (config.batch_size == 0) throw ValidationError("batch size must be positive");
  if (multitask.alpha < 0.0) throw ValidationError("thread loss weight must be non-negative");

  MfModel model(input_dim, config.hidden);
  model.initialize(config.seed);
  nn::Adam adam(model.params().size(), {config.learning_rate});
  nn::EarlyStopping stopper(config.patience);
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  const std::size_t steps_per_epoch = (train.size() + config.batch_size - 1) / config.batch_size;
  const long eval_every = std::max<long>(
      1, std::lround(config.eval_interval_epochs * static_cast<double>(steps_per_epoch)));

  TrainResult result;
  Eigen::VectorXd best = model.params();
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Eigen::VectorXd grad(model.params().size());
  long step = 0;
  double interval_loss = 0.0;
  std::size_t interval_count = 0;

  for (int epoch = 0; epoch < config.max_epochs && !stopper.should_stop(); ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      grad.setZero();
      for (std::size_t k = start; k < stop; ++k) {
        const Example& ex = train[order[k]];
        const auto trunk = model.forward(ex.features);
        const Eigen::VectorXd scores = model.reply_scores(trunk);
        std::vector<double> dscores;
        double loss = row_cross_entropy(
            std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())), ex.label,
            &dscores);
        model.backward_reply(ex.features, trunk,
                             Eigen::Map<const Eigen::VectorXd>(dscores.data(), scores.size()), grad);
        if (multitask.alpha > 0.0 && ex.thread) {
          const auto& th = *ex.thread;
          const auto thread_trunk = model.forward(th.inputs.features);
          const Eigen::VectorXd tscores = model.thread_scores(thread_trunk, th.inputs.extras);
          std::vector<double> dthread;
          loss += multitask.alpha *
                  row_cross_entropy(std::span<const double>(tscores.data(),
                                                            static_cast<std::size_t>(tscores.size())),
                                    th.label, &dthread);
          Eigen::VectorXd scaled =
              multitask.alpha * Eigen::Map<const Eigen::VectorXd>(dthread.data(), tscores.size());
          model.backward_thread(th.inputs.features, th.inputs.extras, thread_trunk, scaled, grad);
        }
        interval_loss += loss;
        ++interval_count;
      }
      grad /= static_cast<double>(stop - start);
      adam.step(model.params(), grad);
      ++step;

      if (step % eval_every == 0) {
        TrainLogEntry entry;
        entry.step = step;
        entry.epoch = static_cast<double>(step) / static_cast<double>(steps_per_epoch);
        entry.train_loss = interval_loss / static_cast<double>(interval_count);
        entry.valid_recall1 = recall_at_1(model, valid);
        if (stopper.update(entry.valid_recall1)) best = model.params();
        entry.evaluation = stopper.evaluations();
        result.log.push_back(entry);
        interval_loss = 0.0;
        interval_count = 0;
        if (stopper.should_stop()) break;
      }
    }
  }

  if (stopper.evaluations() == 0) {
    TrainLogEntry entry;
    entry.step = step;
    entry.epoch = static_cast<double>(step) / static_cast<double>(steps_per_epoch);
    entry.train_loss = interval_count ? interval_loss / static_cast<double>(interval_count) : 0.0;
    entry.valid_recall1 = recall_at_1(model, valid);
    stopper.update(entry.valid_recall1);
    best = model.params();
    entry.evaluation = 1;
    result.log.push_back(entry);
  }

  model.params() = best;
  result.model = std::move(model);
  result.best_evaluation = stopper.best_evaluation();
  result.best_recall1 = stopper.best().value_or(0.0);
  result.stopped_early = stopper.should_stop();
  return result;
}

}  // namespace replymatch
