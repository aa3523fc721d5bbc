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

#ifndef REPLYMATCH_DECODE_HPP_
#define REPLYMATCH_DECODE_HPP_

#include "replymatch/corpus.hpp"
#include "replymatch/scorer.hpp"

namespace replymatch {

/// Links every UOI to its highest-scoring candidate, ties to the most recent.
LinkSet greedy_decode(const ScoreMatrix& matrix);

ThreadPartition decode_threads(const ScoreMatrix& matrix);

}  // namespace replymatch

#endif  // REPLYMATCH_DECODE_HPP_
