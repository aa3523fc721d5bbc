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

#include "replymatch/decode.hpp"

namespace replymatch {

LinkSet greedy_decode(const ScoreMatrix& matrix) {
  LinkSet links;
  for (const auto& row : matrix.rows()) {
    if (row.scores.empty() || row.candidates.size() != row.scores.size()) {
      throw ValidationError("score row " + std::to_string(row.uoi) + " is empty or ragged");
    }
    links.add(row.uoi, row.candidates[argmax_recent(row.scores)]);
  }
  return links;
}

ThreadPartition decode_threads(const ScoreMatrix& matrix) {
  return threads_from_links(greedy_decode(matrix), matrix.size());
}

}  // namespace replymatch
