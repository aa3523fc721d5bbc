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

#include "replymatch/features.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace replymatch {
namespace {

std::vector<std::string_view> token_types(const Utterance& u) {
  std::vector<std::string_view> types(u.tokens.begin(), u.tokens.end());
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  return types;
}

void pool_into(const Utterance& u, const EmbeddingTable& table, FeatureVector& out) {
  const std::size_t d = table.dim();
  std::vector<double> max_block(d, -std::numeric_limits<double>::infinity());
  std::vector<double> sum_block(d, 0.0);
  std::size_t known = 0;
  for (const auto& token : u.tokens) {
    const auto* vec = table.find(token);
    if (vec == nullptr) continue;
    ++known;
    for (std::size_t k = 0; k < d; ++k) {
      max_block[k] = std::max(max_block[k], (*vec)[k]);
      sum_block[k] += (*vec)[k];
    }
  }
  if (known == 0) {
    out.insert(out.end(), 2 * d, 0.0);
    return;
  }
  out.insert(out.end(), max_block.begin(), max_block.end());
  for (double s : sum_block) out.push_back(s / static_cast<double>(known));
}

}  // namespace

bool EmbeddingTable::insert(std::string word, std::vector<double> vec) {
  if (vec.size() != dim_) {
    throw ValidationError("embedding for '" + word + "' has dimension " +
                          std::to_string(vec.size()) + ", expected " + std::to_string(dim_));
  }
  auto [it, inserted] = vectors_.insert_or_assign(std::move(word), std::move(vec));
  return inserted;
}

const std::vector<double>* EmbeddingTable::find(std::string_view word) const {
  auto it = vectors_.find(std::string(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

const std::vector<double>& EmbeddingTable::lookup(std::string_view word) const {
  const auto* vec = find(word);
  return vec ? *vec : zero_;
}

int time_bucket(double minutes) {
  if (minutes < 0.0) return 0;
  if (minutes < 1.0) return 1;
  if (minutes < 5.0) return 2;
  if (minutes < 60.0) return 3;
  return 4;
}

std::array<double, kTimeDiffDim> time_diff_features(const ChatLog& log, std::size_t i,
                                                    std::size_t j) {
  std::array<double, kTimeDiffDim> out{};
  out[0] = static_cast<double>(i - j) / 100.0;
  const double dt = static_cast<double>(log[i].timestamp_min - log[j].timestamp_min);
  out[1 + time_bucket(dt)] = 1.0;
  return out;
}

FeatureVector pair_features(const ChatLog& log, std::size_t i, std::size_t j,
                            const FeatureConfig& config, const EmbeddingTable* table) {
  if (j > i || i >= log.size()) {
    throw ValidationError("pair (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") is not a valid UOI/candidate pair");
  }
  const Utterance& uoi = log[i];
  const Utterance& cand = log[j];

  FeatureVector v;
  v.reserve(config.dimension());
  const auto td = time_diff_features(log, i, j);
  v.insert(v.end(), td.begin(), td.end());

  v.push_back(uoi.speaker == cand.speaker ? 1.0 : 0.0);
  v.push_back(uoi.mentioned_users.contains(cand.speaker) ? 1.0 : 0.0);
  v.push_back(cand.mentioned_users.contains(uoi.speaker) ? 1.0 : 0.0);
  v.push_back(i == j ? 1.0 : 0.0);

  const auto types_i = token_types(uoi);
  const auto types_j = token_types(cand);
  std::vector<std::string_view> common;
  std::set_intersection(types_i.begin(), types_i.end(), types_j.begin(), types_j.end(),
                        std::back_inserter(common));
  const double n_common = static_cast<double>(common.size());
  v.push_back(n_common);
  v.push_back(types_i.empty() ? 0.0 : n_common / static_cast<double>(types_i.size()));
  v.push_back(types_j.empty() ? 0.0 : n_common / static_cast<double>(types_j.size()));

  v.push_back(std::min(1.0, static_cast<double>(uoi.tokens.size()) / 60.0));
  v.push_back(std::min(1.0, static_cast<double>(cand.tokens.size()) / 60.0));

  if (config.use_embeddings) {
    if (table == nullptr) throw ValidationError("embedding features enabled without a table");
    const auto pooled = embedding_pool_features(log, i, j, *table, config.embedding_dim);
    v.insert(v.end(), pooled.begin(), pooled.end());
  }
  return v;
}

FeatureVector embedding_pool_features(const ChatLog& log, std::size_t i, std::size_t j,
                                      const EmbeddingTable& table, std::size_t expected_dim) {
  if (table.dim() != expected_dim) {
    throw ValidationError("embedding table has dimension " + std::to_string(table.dim()) +
                          ", configuration expects " + std::to_string(expected_dim));
  }
  FeatureVector out;
  out.reserve(4 * table.dim());
  pool_into(log[i], table, out);
  pool_into(log[j], table, out);
  return out;
}

EmbeddingTable parse_embeddings(std::string_view text) {
  EmbeddingTable table;
  bool have_dim = false;
  std::vector<std::string> warnings;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;

    std::istringstream fields{std::string(line)};
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> vec;
    std::string number;
    while (fields >> number) {
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
      if (ec != std::errc() || ptr != number.data() + number.size()) {
        throw ParseError("bad number '" + number + "'", line_no);
      }
      vec.push_back(value);
    }
    if (vec.empty()) throw ParseError("word '" + word + "' has no vector", line_no);
    if (!have_dim) {
      table = EmbeddingTable(vec.size());
      have_dim = true;
    } else if (vec.size() != table.dim()) {
      throw ParseError("ragged row: " + std::to_string(vec.size()) + " values, expected " +
                           std::to_string(table.dim()),
                       line_no);
    }
    if (!table.insert(word, std::move(vec))) {
      warnings.push_back("line " + std::to_string(line_no) + ": duplicate word '" + word +
                         "', keeping the last occurrence");
    }
  }
  if (!have_dim) throw ParseError("no embeddings", 0);
  table.warnings = std::move(warnings);
  return table;
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open embedding file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_embeddings(buffer.str());
}

}  // namespace replymatch
