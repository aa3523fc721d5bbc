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

// Handcrafted pairwise features between a UOI u_i and a candidate u_j
// (j <= i). Layout of the base block:
//
//   [0]      relative distance (i - j) / 100
//   [1..5]   time-difference bucket one-hot: [-1,0) [0,1) [1,5) [5,60) [60,inf)
//   [6]      same speaker
//   [7]      u_i mentions the speaker of u_j
//   [8]      u_j mentions the speaker of u_i
//   [9]      self pair (i == j)
//   [10]     |common token types|
//   [11,12]  |common| / |types of u_i|, |common| / |types of u_j|
//   [13,14]  token counts n_i / 60, n_j / 60, clipped to 1
//
// followed, when embeddings are enabled, by max and mean pooled vectors of
// u_i and then u_j.

#ifndef REPLYMATCH_FEATURES_HPP_
#define REPLYMATCH_FEATURES_HPP_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "replymatch/corpus.hpp"

namespace replymatch {

inline constexpr std::size_t kTimeDiffDim = 6;
inline constexpr std::size_t kBaseFeatureDim = 15;

namespace feature_slot {
inline constexpr std::size_t kDistance = 0;
inline constexpr std::size_t kTimeBucket = 1;
inline constexpr std::size_t kSameSpeaker = 6;
inline constexpr std::size_t kUoiMentionsCandidate = 7;
inline constexpr std::size_t kCandidateMentionsUoi = 8;
inline constexpr std::size_t kSelf = 9;
inline constexpr std::size_t kCommonTokens = 10;
inline constexpr std::size_t kCommonOverUoi = 11;
inline constexpr std::size_t kCommonOverCandidate = 12;
inline constexpr std::size_t kUoiLength = 13;
inline constexpr std::size_t kCandidateLength = 14;
inline constexpr std::size_t kEmbedding = 15;
}  // namespace feature_slot

struct FeatureConfig {
  bool use_embeddings = false;
  std::size_t embedding_dim = 0;

  std::size_t dimension() const {
    return kBaseFeatureDim + (use_embeddings ? 4 * embedding_dim : 0);
  }
};

using FeatureVector = std::vector<double>;

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim), zero_(dim, 0.0) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  /// Replaces any existing vector; returns false when `word` was present.
  bool insert(std::string word, std::vector<double> vec);
  const std::vector<double>* find(std::string_view word) const;
  /// The stored vector, or zeros for unknown words.
  const std::vector<double>& lookup(std::string_view word) const;

  /// Messages produced while loading (duplicate words).
  std::vector<std::string> warnings;

 private:
  std::size_t dim_ = 0;
  std::vector<double> zero_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Index of the time bucket that fires for a difference of `minutes`:
/// 0 for (-inf,0), 1 for [0,1), 2 for [1,5), 3 for [5,60), 4 for [60,inf).
/// Negative differences beyond -1 also land in bucket 0.
int time_bucket(double minutes);

/// [n', x1..x5] for UOI i and candidate j.
std::array<double, kTimeDiffDim> time_diff_features(const ChatLog& log, std::size_t i,
                                                    std::size_t j);

/// `table` is required when config.use_embeddings is set.
FeatureVector pair_features(const ChatLog& log, std::size_t i, std::size_t j,
                            const FeatureConfig& config, const EmbeddingTable* table = nullptr);

/// max(u_i) | mean(u_i) | max(u_j) | mean(u_j); unknown tokens are skipped.
FeatureVector embedding_pool_features(const ChatLog& log, std::size_t i, std::size_t j,
                                      const EmbeddingTable& table, std::size_t expected_dim);

/// GloVe-style text: `word v1 ... vd` per line.
EmbeddingTable parse_embeddings(std::string_view text);
EmbeddingTable load_embeddings(const std::string& path);

}  // namespace replymatch

#endif  // REPLYMATCH_FEATURES_HPP_
