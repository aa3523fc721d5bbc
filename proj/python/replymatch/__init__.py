# Copyright 2026 The replymatch Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python bindings for the replymatch chat disentanglement library."""

from ._core import (
    ChatLog,
    ParseError,
    ScoreMatrix,
    Utterance,
    ValidationError,
    bipartite_decode,
    exact_match_f1,
    greedy_decode,
    heuristic_capacities,
    link_prf,
    one_to_one,
    oracle_capacities,
    parse_annotations,
    parse_chat_log,
    read_canonical,
    score_mass,
    threads_from_links,
    variation_of_information,
)

__all__ = [
    "ChatLog",
    "ParseError",
    "ScoreMatrix",
    "Utterance",
    "ValidationError",
    "bipartite_decode",
    "exact_match_f1",
    "greedy_decode",
    "heuristic_capacities",
    "link_prf",
    "one_to_one",
    "oracle_capacities",
    "parse_annotations",
    "parse_chat_log",
    "read_canonical",
    "score_mass",
    "threads_from_links",
    "variation_of_information",
]
