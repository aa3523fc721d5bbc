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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "replymatch/corpus.hpp"
#include "replymatch/decode.hpp"
#include "replymatch/errors.hpp"
#include "replymatch/matching.hpp"
#include "replymatch/metrics.hpp"
#include "replymatch/scorer.hpp"

namespace py = pybind11;
namespace rm = replymatch;

namespace {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

rm::LinkSet to_links(const Pairs& pairs) {
  rm::LinkSet links;
  for (const auto& [child, parent] : pairs) links.add(child, parent);
  return links;
}

Pairs from_links(const rm::LinkSet& links) {
  Pairs out;
  for (const auto& l : links) out.emplace_back(l.child, l.parent);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Reply-structure decoding and thread evaluation";

  py::register_exception<rm::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<rm::ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<rm::Utterance>(m, "Utterance")
      .def_readonly("index", &rm::Utterance::index)
      .def_readonly("timestamp_min", &rm::Utterance::timestamp_min)
      .def_readonly("speaker", &rm::Utterance::speaker)
      .def_readonly("raw_text", &rm::Utterance::raw_text)
      .def_readonly("tokens", &rm::Utterance::tokens)
      .def_readonly("mentioned_users", &rm::Utterance::mentioned_users)
      .def_property_readonly("is_system", &rm::Utterance::is_system);

  py::class_<rm::ChatLog>(m, "ChatLog")
      .def_readonly("id", &rm::ChatLog::id)
      .def_readonly("utterances", &rm::ChatLog::utterances)
      .def_readonly("start_clock_min", &rm::ChatLog::start_clock_min)
      .def("__len__", &rm::ChatLog::size)
      .def("to_jsonl", [](const rm::ChatLog& log) { return rm::write_canonical(log); });

  m.def("parse_chat_log", &rm::parse_chat_log, py::arg("text"), py::arg("id") = "");
  m.def("read_canonical", &rm::read_canonical, py::arg("text"), py::arg("id") = "");
  m.def(
      "parse_annotations",
      [](const std::string& text, const rm::ChatLog& log) {
        return from_links(rm::parse_annotations(text, log));
      },
      py::arg("text"), py::arg("log"), "Gold links as (child, parent) pairs.");
  m.def(
      "threads_from_links",
      [](const Pairs& links, std::size_t n) {
        return rm::connected_threads(to_links(links), n).labels();
      },
      py::arg("links"), py::arg("n"), "Thread label per utterance.");

  py::class_<rm::ScoreMatrix>(m, "ScoreMatrix")
      .def(py::init([](const std::vector<std::tuple<std::size_t, std::vector<std::size_t>,
                                                     std::vector<double>>>& rows) {
             std::vector<rm::ScoreRow> out;
             for (const auto& [uoi, candidates, scores] : rows) {
               out.push_back({uoi, candidates, scores});
             }
             return rm::ScoreMatrix(std::move(out));
           }),
           py::arg("rows"), "Rows of (uoi, candidates, scores).")
      .def_static("from_text", &rm::import_scores)
      .def("to_text", [](const rm::ScoreMatrix& s) { return rm::export_scores(s); })
      .def("__len__", &rm::ScoreMatrix::size)
      .def("row", [](const rm::ScoreMatrix& s, std::size_t i) {
        if (i >= s.size()) throw py::index_error();
        return py::make_tuple(s[i].uoi, s[i].candidates, s[i].scores);
      })
      .def("probabilities", &rm::ScoreMatrix::probabilities)
      .def("validate", &rm::ScoreMatrix::validate, py::arg("n"), py::arg("k_c") = py::none());

  m.def(
      "greedy_decode", [](const rm::ScoreMatrix& s) { return from_links(rm::greedy_decode(s)); },
      py::arg("scores"));
  m.def("score_mass", &rm::score_mass, py::arg("scores"));
  m.def(
      "heuristic_capacities",
      [](const std::vector<double>& mass, double alpha, double beta) {
        return rm::estimate_freq_heuristic(mass, {alpha, beta}).delta;
      },
      py::arg("mass"), py::arg("alpha") = 1.3, py::arg("beta") = 0.2);
  m.def(
      "oracle_capacities",
      [](const Pairs& gold, std::size_t n, std::size_t k_c) {
        return rm::oracle_capacities(to_links(gold), n, k_c).delta;
      },
      py::arg("gold"), py::arg("n"), py::arg("k_c"));
  m.def(
      "bipartite_decode",
      [](const rm::ScoreMatrix& s, const std::vector<int>& capacities, bool strict) {
        const auto d = rm::bipartite_links(s, rm::CapacityVector{capacities},
                                           strict ? rm::MatchMode::kStrict : rm::MatchMode::kRelaxed);
        py::dict out;
        out["links"] = from_links(d.links);
        out["total_weight"] = d.match.total_weight;
        out["unmatched"] = d.match.unmatched_left;
        out["feasible_strict"] = d.match.feasible_strict;
        return out;
      },
      py::arg("scores"), py::arg("capacities"), py::arg("strict") = false);

  m.def(
      "link_prf",
      [](const Pairs& pred, const Pairs& gold) {
        const auto e = rm::link_prf(to_links(pred), to_links(gold));
        return py::make_tuple(e.precision, e.recall, e.f1);
      },
      py::arg("pred"), py::arg("gold"));
  m.def(
      "one_to_one",
      [](const std::vector<std::size_t>& pred, const std::vector<std::size_t>& gold) {
        return rm::one_to_one(rm::ThreadPartition(pred), rm::ThreadPartition(gold));
      },
      py::arg("pred"), py::arg("gold"));
  m.def(
      "variation_of_information",
      [](const std::vector<std::size_t>& pred, const std::vector<std::size_t>& gold) {
        const auto v =
            rm::variation_of_information(rm::ThreadPartition(pred), rm::ThreadPartition(gold));
        return py::make_tuple(v.raw, v.scaled);
      },
      py::arg("pred"), py::arg("gold"), "Returns (raw nats, scaled 0..100).");
  m.def(
      "exact_match_f1",
      [](const std::vector<std::size_t>& pred, const std::vector<std::size_t>& gold) {
        return rm::exact_match_f1(rm::ThreadPartition(pred), rm::ThreadPartition(gold));
      },
      py::arg("pred"), py::arg("gold"));
}
