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

#include "replymatch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "replymatch/matching.hpp"

namespace replymatch {
namespace {

void require_same_universe(const ThreadPartition& pred, const ThreadPartition& gold) {
  if (pred.size() != gold.size()) {
    throw ValidationError("partitions cover " + std::to_string(pred.size()) + " and " +
                          std::to_string(gold.size()) + " utterances");
  }
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

LinkEval link_prf_from_counts(std::size_t true_positive, std::size_t predicted, std::size_t gold) {
  LinkEval out;
  out.true_positive = true_positive;
  out.predicted = predicted;
  out.gold = gold;
  out.precision = predicted ? static_cast<double>(true_positive) / predicted : 0.0;
  out.recall = gold ? static_cast<double>(true_positive) / gold : 0.0;
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

LinkEval link_prf(const LinkSet& pred, const LinkSet& gold) {
  std::size_t tp = 0;
  for (const auto& link : pred) {
    if (gold.contains(link.child, link.parent)) ++tp;
  }
  return link_prf_from_counts(tp, pred.size(), gold.size());
}

RankEval recall_at_k(const ScoreMatrix& matrix, const LinkSet& gold,
                     std::span<const std::size_t> ks) {
  RankEval out;
  for (std::size_t k : ks) out.hits[k] = 0;
  for (const auto& row : matrix.rows()) {
    const auto parents = gold.parents_of(row.uoi);
    // Best rank (0-based) of any gold parent in this row.
    std::optional<std::size_t> best_rank;
    std::vector<std::size_t> order(row.scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&row](std::size_t a, std::size_t b) {
      if (row.scores[a] != row.scores[b]) return row.scores[a] > row.scores[b];
      return row.candidates[a] > row.candidates[b];
    });
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      const std::size_t cand = row.candidates[order[rank]];
      if (std::binary_search(parents.begin(), parents.end(), cand)) {
        best_rank = rank;
        break;
      }
    }
    if (!best_rank) continue;
    ++out.eligible;
    for (std::size_t k : ks) {
      if (*best_rank < k) ++out.hits[k];
    }
  }
  for (std::size_t k : ks) {
    out.recall_at[k] =
        out.eligible ? static_cast<double>(out.hits[k]) / static_cast<double>(out.eligible) : 0.0;
  }
  return out;
}

double one_to_one_overlap(const ThreadPartition& pred, const ThreadPartition& gold) {
  require_same_universe(pred, gold);
  const auto pred_threads = pred.threads();
  const auto gold_threads = gold.threads();

  BipartiteGraph graph;
  graph.left_count = pred_threads.size();
  std::map<std::size_t, std::size_t> gold_group;
  for (const auto& [id, members] : gold_threads) {
    gold_group[id] = graph.groups.size();
    graph.groups.push_back({id, 1});
  }
  std::size_t left = 0;
  for (const auto& [id, members] : pred_threads) {
    std::map<std::size_t, std::size_t> overlap;
    for (std::size_t m : members) ++overlap[gold.thread_of(m)];
    for (const auto& [gold_id, count] : overlap) {
      graph.edges.push_back({left, gold_group[gold_id], static_cast<double>(count)});
    }
    ++left;
  }
  return solve_matching(graph, MatchMode::kRelaxed).total_weight;
}

double one_to_one(const ThreadPartition& pred, const ThreadPartition& gold) {
  if (pred.size() == 0) return 100.0;
  return 100.0 * one_to_one_overlap(pred, gold) / static_cast<double>(pred.size());
}

ViResult variation_of_information(const ThreadPartition& pred, const ThreadPartition& gold) {
  require_same_universe(pred, gold);
  const std::size_t n = pred.size();
  ViResult out;
  if (n < 2) {
    out.scaled = 100.0;
    return out;
  }
  std::map<std::size_t, double> pred_count, gold_count;
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  for (std::size_t i = 0; i < n; ++i) {
    pred_count[pred.thread_of(i)] += 1.0;
    gold_count[gold.thread_of(i)] += 1.0;
    joint[{pred.thread_of(i), gold.thread_of(i)}] += 1.0;
  }
  const double total = static_cast<double>(n);
  auto entropy = [total](const auto& counts) {
    double h = 0.0;
    for (const auto& [key, c] : counts) h -= (c / total) * std::log(c / total);
    return h;
  };
  double mutual = 0.0;
  for (const auto& [key, c] : joint) {
    mutual += (c / total) *
              std::log(c * total / (pred_count[key.first] * gold_count[key.second]));
  }
  out.raw = std::max(0.0, entropy(pred_count) + entropy(gold_count) - 2.0 * mutual);
  out.scaled = 100.0 * (1.0 - out.raw / std::log(total));
  return out;
}

ExactMatchCounts exact_match_counts(const ThreadPartition& pred, const ThreadPartition& gold,
                                    ExactMatchPrecision mode) {
  require_same_universe(pred, gold);
  ExactMatchCounts out;
  std::set<std::vector<std::size_t>> pred_sets;
  for (auto& [id, members] : pred.threads()) {
    if (mode == ExactMatchPrecision::kAllPredictions || members.size() >= 2) ++out.predicted;
    pred_sets.insert(std::move(members));
  }
  for (const auto& [id, members] : gold.threads()) {
    if (members.size() < 2) continue;
    ++out.gold;
    if (pred_sets.contains(members)) ++out.matches;
  }
  return out;
}

double exact_match_f1(const ThreadPartition& pred, const ThreadPartition& gold,
                      ExactMatchPrecision mode) {
  const auto counts = exact_match_counts(pred, gold, mode);
  if (counts.predicted == 0 || counts.gold == 0) return 0.0;
  return 100.0 * harmonic(static_cast<double>(counts.matches) / counts.predicted,
                          static_cast<double>(counts.matches) / counts.gold);
}

// ---------------------------------------------------------------------------

void EvalAccumulator::add(const LinkSet& pred, const LinkSet& gold, std::size_t n,
                          const ScoreMatrix* scores) {
  PerLog entry;
  entry.n = n;
  entry.link = link_prf(pred, gold);
  if (scores != nullptr) entry.rank = recall_at_k(*scores, gold);
  const ThreadPartition pred_threads = threads_from_links(pred, n);
  const ThreadPartition gold_threads = connected_threads(gold, n);
  entry.overlap = one_to_one_overlap(pred_threads, gold_threads);
  entry.one_to_one = n ? 100.0 * entry.overlap / static_cast<double>(n) : 100.0;
  entry.vi = variation_of_information(pred_threads, gold_threads);
  entry.exact = exact_match_counts(pred_threads, gold_threads, exact_mode_);
  logs_.push_back(std::move(entry));
}

MetricReport EvalAccumulator::report(bool macro) const {
  MetricReport r;
  r.logs = logs_.size();
  for (const auto& log : logs_) r.utterances += log.n;
  if (logs_.empty()) return r;
  const bool have_rank =
      std::all_of(logs_.begin(), logs_.end(), [](const PerLog& l) { return l.rank.has_value(); });

  if (macro) {
    const double count = static_cast<double>(logs_.size());
    double r1 = 0, r5 = 0, r10 = 0;
    for (const auto& log : logs_) {
      r.link_precision += 100.0 * log.link.precision / count;
      r.link_recall += 100.0 * log.link.recall / count;
      r.link_f1 += 100.0 * log.link.f1 / count;
      r.one_to_one += log.one_to_one / count;
      r.scaled_vi += log.vi.scaled / count;
      r.raw_vi += log.vi.raw / count;
      const auto& e = log.exact;
      const double f = (e.predicted && e.gold)
                           ? 100.0 * harmonic(static_cast<double>(e.matches) / e.predicted,
                                              static_cast<double>(e.matches) / e.gold)
                           : 0.0;
      r.exact_f1 += f / count;
      if (have_rank) {
        r1 += 100.0 * log.rank->recall_at.at(1) / count;
        r5 += 100.0 * log.rank->recall_at.at(5) / count;
        r10 += 100.0 * log.rank->recall_at.at(10) / count;
      }
    }
    if (have_rank) {
      r.recall1 = r1;
      r.recall5 = r5;
      r.recall10 = r10;
    }
    return r;
  }

  std::size_t tp = 0, pred = 0, gold = 0, eligible = 0, h1 = 0, h5 = 0, h10 = 0;
  ExactMatchCounts exact;
  double overlap = 0.0, vi_scaled = 0.0, vi_raw = 0.0;
  for (const auto& log : logs_) {
    tp += log.link.true_positive;
    pred += log.link.predicted;
    gold += log.link.gold;
    overlap += log.overlap;
    vi_scaled += log.vi.scaled * static_cast<double>(log.n);
    vi_raw += log.vi.raw * static_cast<double>(log.n);
    exact.matches += log.exact.matches;
    exact.predicted += log.exact.predicted;
    exact.gold += log.exact.gold;
    if (have_rank) {
      eligible += log.rank->eligible;
      h1 += log.rank->hits.at(1);
      h5 += log.rank->hits.at(5);
      h10 += log.rank->hits.at(10);
    }
  }
  const LinkEval link = link_prf_from_counts(tp, pred, gold);
  r.link_precision = 100.0 * link.precision;
  r.link_recall = 100.0 * link.recall;
  r.link_f1 = 100.0 * link.f1;
  const double n = static_cast<double>(std::max<std::size_t>(r.utterances, 1));
  r.one_to_one = 100.0 * overlap / n;
  r.scaled_vi = vi_scaled / n;
  r.raw_vi = vi_raw / n;
  r.exact_f1 = (exact.predicted && exact.gold)
                   ? 100.0 * harmonic(static_cast<double>(exact.matches) / exact.predicted,
                                      static_cast<double>(exact.matches) / exact.gold)
                   : 0.0;
  if (have_rank) {
    const double e = static_cast<double>(std::max<std::size_t>(eligible, 1));
    r.recall1 = 100.0 * static_cast<double>(h1) / e;
    r.recall5 = 100.0 * static_cast<double>(h5) / e;
    r.recall10 = 100.0 * static_cast<double>(h10) / e;
  }
  return r;
}

std::string format_report_table(const MetricReport& report) {
  auto cell = [](std::optional<double> v) {
    char buf[16];
    if (v) {
      std::snprintf(buf, sizeof(buf), "%7.1f", *v);
    } else {
      std::snprintf(buf, sizeof(buf), "%7s", "-");
    }
    return std::string(buf);
  };
  std::string out;
  out += "|     Link Prediction     |         Ranking         |       Clustering        |\n";
  out += "|    P       R       F1   |   R@1     R@5     R@10  |   1-1     VI       F    |\n";
  out += "|" + cell(report.link_precision) + " " + cell(report.link_recall) + " " +
         cell(report.link_f1) + "  |" + cell(report.recall1) + " " + cell(report.recall5) + " " +
         cell(report.recall10) + "  |" + cell(report.one_to_one) + " " + cell(report.scaled_vi) +
         " " + cell(report.exact_f1) + "  |\n";
  return out;
}

std::string format_report_records(const MetricReport& report) {
  std::string out;
  auto put = [&out](const char* key, double value) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s=%.6f\n", key, value);
    out += buf;
  };
  out += "logs=" + std::to_string(report.logs) + "\n";
  out += "utterances=" + std::to_string(report.utterances) + "\n";
  put("link_precision", report.link_precision);
  put("link_recall", report.link_recall);
  put("link_f1", report.link_f1);
  if (report.recall1) put("recall_at_1", *report.recall1);
  if (report.recall5) put("recall_at_5", *report.recall5);
  if (report.recall10) put("recall_at_10", *report.recall10);
  put("one_to_one", report.one_to_one);
  put("scaled_vi", report.scaled_vi);
  put("raw_vi", report.raw_vi);
  put("exact_match_f1", report.exact_f1);
  return out;
}

}  // namespace replymatch
