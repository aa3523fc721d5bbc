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

// Evaluation of predicted reply-to links (precision / recall / F1), of
// candidate rankings (Recall@k) and of the recovered threads (one-to-one
// overlap, variation of information, exact-match F1).

#ifndef REPLYMATCH_METRICS_HPP_
#define REPLYMATCH_METRICS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "replymatch/corpus.hpp"
#include "replymatch/scorer.hpp"

namespace replymatch {

/// Fractions in [0, 1].
struct LinkEval {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positive = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

LinkEval link_prf(const LinkSet& pred, const LinkSet& gold);
LinkEval link_prf_from_counts(std::size_t true_positive, std::size_t predicted, std::size_t gold);

inline constexpr std::size_t kDefaultRecallKs[] = {1, 5, 10};

struct RankEval {
  std::map<std::size_t, double> recall_at;  // k -> fraction
  std::map<std::size_t, std::size_t> hits;  // k -> count
  std::size_t eligible = 0;                 // UOIs with a gold parent in their row
};

/// A UOI counts as a hit at k when any gold parent is among its k best
/// candidates (ties ranked most recent first).
RankEval recall_at_k(const ScoreMatrix& matrix, const LinkSet& gold,
                     std::span<const std::size_t> ks = kDefaultRecallKs);

/// Best one-to-one thread alignment, scaled to [0, 100].
double one_to_one(const ThreadPartition& pred, const ThreadPartition& gold);
/// Sum of overlaps of the best alignment (numerator of one_to_one).
double one_to_one_overlap(const ThreadPartition& pred, const ThreadPartition& gold);

struct ViResult {
  double raw = 0.0;     // nats
  double scaled = 0.0;  // 100 * (1 - raw / ln N), 100 when N < 2
};

ViResult variation_of_information(const ThreadPartition& pred, const ThreadPartition& gold);

enum class ExactMatchPrecision {
  kMultiUtterancePredictions,  // denominator ignores predicted singletons
  kAllPredictions,
};

struct ExactMatchCounts {
  std::size_t matches = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

/// Gold singleton threads are ignored.
ExactMatchCounts exact_match_counts(
    const ThreadPartition& pred, const ThreadPartition& gold,
    ExactMatchPrecision mode = ExactMatchPrecision::kMultiUtterancePredictions);

/// F1 in [0, 100]; 0 when precision or recall is undefined.
double exact_match_f1(const ThreadPartition& pred, const ThreadPartition& gold,
                      ExactMatchPrecision mode = ExactMatchPrecision::kMultiUtterancePredictions);

// ---------------------------------------------------------------------------
// Corpus-level reports

/// All values on a 0-100 scale.
struct MetricReport {
  double link_precision = 0.0;
  double link_recall = 0.0;
  double link_f1 = 0.0;
  std::optional<double> recall1, recall5, recall10;
  double one_to_one = 0.0;
  double scaled_vi = 0.0;
  double raw_vi = 0.0;  // nats, utterance-weighted mean
  double exact_f1 = 0.0;
  std::size_t logs = 0;
  std::size_t utterances = 0;
};

/// Collects per-log results. Micro averaging pools counts (link and exact
/// match) and weights per-log cluster scores by utterance count; macro
/// averaging takes the unweighted mean of per-log values.
class EvalAccumulator {
 public:
  explicit EvalAccumulator(
      ExactMatchPrecision exact_mode = ExactMatchPrecision::kMultiUtterancePredictions)
      : exact_mode_(exact_mode) {}

  /// `scores` enables Recall@k.
  void add(const LinkSet& pred, const LinkSet& gold, std::size_t n,
           const ScoreMatrix* scores = nullptr);

  MetricReport report(bool macro = false) const;

 private:
  struct PerLog {
    std::size_t n = 0;
    LinkEval link;
    std::optional<RankEval> rank;
    double one_to_one = 0.0;
    double overlap = 0.0;
    ViResult vi;
    ExactMatchCounts exact;
  };

  ExactMatchPrecision exact_mode_;
  std::vector<PerLog> logs_;
};

/// Fixed-width table: Link P/R/F1 | R@1/5/10 | 1-1/VI/F.
std::string format_report_table(const MetricReport& report);
/// `key=value` records, one per line.
std::string format_report_records(const MetricReport& report);

}  // namespace replymatch

#endif  // REPLYMATCH_METRICS_HPP_
