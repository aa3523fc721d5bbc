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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"
#include "replymatch/corpus.hpp"
#include "replymatch/decode.hpp"
#include "replymatch/matching.hpp"
#include "replymatch/scorer.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
namespace rm = replymatch;
namespace cli = replymatch::cli;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("replymatch_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string operator/(const std::string& leaf) const { return (path_ / leaf).string(); }

 private:
  fs::path path_;
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream(path) << text;
}

// Ingests the five-line fixture into `dir/corpus` and its scores into
// `dir/scores`.
void stage_fixture(const TempDir& dir) {
  const auto ingest = run({"ingest", "--log", rm::testing::fixture_path("five.log"), "--ann",
                           rm::testing::fixture_path("five.ann"), "--out", dir / "corpus"});
  REQUIRE(ingest.code == cli::kExitOk);
  spit(dir / "raw/five.scores", rm::testing::read_fixture("five.scores"));
  const auto score = run({"score", "--corpus", dir / "corpus", "--import", dir / "raw", "--out",
                          dir / "scores"});
  REQUIRE(score.code == cli::kExitOk);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("ingest reports the fixture summary") {
    TempDir dir;
    const std::vector<std::string> args = {"ingest", "--log", rm::testing::fixture_path("five.log"),
                                           "--ann", rm::testing::fixture_path("five.ann"), "--out",
                                           dir / "corpus"};
    const auto first = run(args);
    REQUIRE(first.code == cli::kExitOk);
    CHECK(first.out == "log=five N=5 threads=1 avg_parent=1.0000\n");
    const std::string jsonl = slurp(dir / "corpus/five.jsonl");
    const std::string ann = slurp(dir / "corpus/five.ann");
    CHECK(jsonl.rfind("{\"index\":0,\"time\":540", 0) == 0);

    const auto again = run(args);
    CHECK(again.code == cli::kExitOk);
    CHECK(slurp(dir / "corpus/five.jsonl") == jsonl);
    CHECK(slurp(dir / "corpus/five.ann") == ann);
  }

  TEST_CASE("input problems exit with code two") {
    TempDir dir;
    CHECK(run({"ingest", "--log", dir / "missing.log", "--out", dir / "corpus"}).code ==
          cli::kExitInputError);
    CHECK(run({"no-such-command"}).code == cli::kExitInputError);
    CHECK(run({"decode", "--mode", "sideways", "--corpus", dir / "c", "--out", dir / "o"}).code ==
          cli::kExitInputError);

    spit(dir / "bad.log", "[09:00] <a> fine\nnot a log line\n");
    const auto bad = run({"ingest", "--log", dir / "bad.log", "--out", dir / "corpus"});
    CHECK(bad.code == cli::kExitInputError);
    CHECK(bad.err.find("bad.log") != std::string::npos);
    CHECK(bad.err.find("line 2") != std::string::npos);
  }

  TEST_CASE("a score matrix of the wrong size is rejected") {
    TempDir dir;
    stage_fixture(dir);
    spit(dir / "short/five.scores", "0\t0\t1\n1\t0 1\t1 2\n");
    CHECK(run({"decode", "--corpus", dir / "corpus", "--scores", dir / "short", "--out",
               dir / "pred"})
              .code == cli::kExitInputError);
  }

  TEST_CASE("greedy decode through the tool matches the library") {
    TempDir dir;
    stage_fixture(dir);
    const auto r = run({"decode", "--corpus", dir / "corpus", "--scores", dir / "scores", "--out",
                        dir / "pred", "--mode", "greedy"});
    REQUIRE(r.code == cli::kExitOk);
    const auto m = rm::import_scores(rm::testing::read_fixture("five.scores"));
    CHECK(slurp(dir / "pred/five.links") == rm::format_links(rm::greedy_decode(m)));
    CHECK(rm::parse_threads(slurp(dir / "pred/five.threads")) == rm::decode_threads(m));
    CHECK_FALSE(fs::exists(dir / "pred/five.freq"));
  }

  TEST_CASE("oracle capacities and evaluation") {
    TempDir dir;
    stage_fixture(dir);
    const auto r = run({"decode", "--corpus", dir / "corpus", "--scores", dir / "scores", "--out",
                        dir / "pred", "--mode", "bipartite", "--freq", "oracle"});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(rm::parse_capacities(slurp(dir / "pred/five.freq")).delta == std::vector<int>{2, 1, 2, 0, 0});

    const auto e = run({"eval", "--corpus", dir / "corpus", "--pred", dir / "pred", "--scores",
                        dir / "scores", "--format", "records"});
    REQUIRE(e.code == cli::kExitOk);
    CHECK(e.out.find("link_f1=100.000000") != std::string::npos);
    CHECK(e.out.find("one_to_one=100.000000") != std::string::npos);
    CHECK(e.out.find("scaled_vi=100.000000") != std::string::npos);
    CHECK(e.out.find("exact_match_f1=100.000000") != std::string::npos);
  }

  TEST_CASE("strict matching without capacity exits with code one") {
    TempDir dir;
    stage_fixture(dir);
    const std::vector<std::string> base = {"decode", "--corpus", dir / "corpus", "--scores",
                                           dir / "scores", "--out", dir / "pred", "--mode",
                                           "bipartite", "--alpha", "0", "--beta", "0"};
    CHECK(run(base).code == cli::kExitOk);
    auto strict = base;
    strict.push_back("--strict");
    CHECK(run(strict).code == cli::kExitInfeasible);
  }

  TEST_CASE("config files fill options the command line leaves unset") {
    TempDir dir;
    stage_fixture(dir);
    spit(dir / "decode.cfg", "# capacities\nmode=bipartite\nfreq=oracle\nalpha=0\n");
    auto r = run({"decode", "--config", dir / "decode.cfg", "--corpus", dir / "corpus", "--scores",
                  dir / "scores", "--out", dir / "pred"});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(rm::parse_capacities(slurp(dir / "pred/five.freq")).delta == std::vector<int>{2, 1, 2, 0, 0});

    // The command line wins over the file.
    r = run({"decode", "--config", dir / "decode.cfg", "--corpus", dir / "corpus", "--scores",
             dir / "scores", "--out", dir / "pred2", "--mode", "greedy"});
    REQUIRE(r.code == cli::kExitOk);
    CHECK_FALSE(fs::exists(dir / "pred2/five.freq"));

    spit(dir / "typo.cfg", "mdoe=greedy\n");
    CHECK(run({"decode", "--config", dir / "typo.cfg", "--corpus", dir / "corpus", "--scores",
               dir / "scores", "--out", dir / "pred3"})
              .code == cli::kExitInputError);
    spit(dir / "twice.cfg", "mode=greedy\nmode=bipartite\n");
    CHECK(run({"decode", "--config", dir / "twice.cfg", "--corpus", dir / "corpus", "--scores",
               dir / "scores", "--out", dir / "pred4"})
              .code == cli::kExitInputError);
  }

  TEST_CASE("sweep output loads back as a decode config") {
    TempDir dir;
    stage_fixture(dir);
    const auto s = run({"sweep", "--corpus", dir / "corpus", "--scores", dir / "scores", "--out",
                        dir / "best.cfg", "--alphas", "0.9,1.3", "--betas", "0.1,0.5"});
    REQUIRE(s.code == cli::kExitOk);
    const auto again = run({"sweep", "--corpus", dir / "corpus", "--scores", dir / "scores",
                            "--out", dir / "best2.cfg", "--alphas", "0.9,1.3", "--betas",
                            "0.1,0.5"});
    CHECK(again.out == s.out);
    CHECK(slurp(dir / "best.cfg") == slurp(dir / "best2.cfg"));
    const auto d = run({"decode", "--config", dir / "best.cfg", "--corpus", dir / "corpus",
                        "--scores", dir / "scores", "--out", dir / "pred", "--mode", "bipartite"});
    CHECK(d.code == cli::kExitOk);
  }

  TEST_CASE("help exits cleanly") {
    const auto r = run({"--help"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("decode") != std::string::npos);
  }
}
