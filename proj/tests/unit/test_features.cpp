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

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "replymatch/features.hpp"
#include "replymatch/random.hpp"
#include "support/synthetic.hpp"

namespace rm = replymatch;
namespace slot = replymatch::feature_slot;

namespace {

// Utterance k is spoken at minute minutes[k].
rm::ChatLog timed_log(const std::vector<int>& minutes) {
  std::string text;
  for (std::size_t k = 0; k < minutes.size(); ++k) {
    char stamp[16];
    std::snprintf(stamp, sizeof(stamp), "[%02d:%02d]", (minutes[k] / 60) % 24, minutes[k] % 60);
    text += std::string(stamp) + " <u" + std::to_string(k % 2) + "> w" + std::to_string(k) + "\n";
  }
  return rm::parse_chat_log(text);
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("time difference vectors") {
    SUBCASE("three back, three minutes") {
      const auto log = timed_log({600, 600, 601, 603});
      CHECK(rm::time_diff_features(log, 3, 0) == std::array<double, 6>{0.03, 0, 0, 1, 0, 0});
    }
    SUBCASE("self pair") {
      const auto log = timed_log({600, 605});
      CHECK(rm::time_diff_features(log, 1, 1) == std::array<double, 6>{0, 0, 1, 0, 0, 0});
    }
    SUBCASE("fifty back, two hours") {
      std::vector<int> minutes(51, 600);
      minutes[50] = 720;
      const auto log = timed_log(minutes);
      CHECK(rm::time_diff_features(log, 50, 0) == std::array<double, 6>{0.5, 0, 0, 0, 0, 1});
    }
  }

  TEST_CASE("bucket edges") {
    CHECK(rm::time_bucket(-0.5) == 0);
    CHECK(rm::time_bucket(-3.0) == 0);
    CHECK(rm::time_bucket(0.0) == 1);
    CHECK(rm::time_bucket(1.0) == 2);
    CHECK(rm::time_bucket(5.0) == 3);
    CHECK(rm::time_bucket(59.999) == 3);
    CHECK(rm::time_bucket(60.0) == 4);
  }

  TEST_CASE("exactly one bucket fires") {
    rm::Rng rng(11);
    for (int k = 0; k < 1000; ++k) {
      const double dt = rng.uniform(-5.0, 200.0);
      int fired = 0;
      for (int b = 0; b < 5; ++b) fired += rm::time_bucket(dt) == b;
      CHECK(fired == 1);
    }
  }

  TEST_CASE("self pair flags") {
    const auto log = rm::parse_chat_log("[10:00] <a> the cat the dog\n");
    const auto v = rm::pair_features(log, 0, 0, {});
    CHECK(v.size() == rm::kBaseFeatureDim);
    CHECK(v[slot::kSelf] == 1.0);
    CHECK(v[slot::kSameSpeaker] == 1.0);
    CHECK(v[slot::kCommonOverUoi] == 1.0);
    CHECK(v[slot::kCommonOverCandidate] == 1.0);
  }

  TEST_CASE("disjoint pair has zero flags and overlap") {
    const auto log = rm::parse_chat_log("[10:00] <a> red green\n[10:01] <b> blue yellow\n");
    const auto v = rm::pair_features(log, 1, 0, {});
    for (std::size_t s = slot::kSameSpeaker; s <= slot::kCommonOverCandidate; ++s) {
      CHECK(v[s] == 0.0);
    }
    CHECK(v[slot::kUoiLength] == doctest::Approx(2.0 / 60.0));
  }

  TEST_CASE("overlap counts on a hand-made pair") {
    const auto log =
        rm::parse_chat_log("[10:00] <a> a1 b1 c1 d1 e1 f1 g1 h1\n[10:01] <b> a1 b1 x1 y1\n");
    const auto v = rm::pair_features(log, 1, 0, {});
    CHECK(v[slot::kCommonTokens] == 2.0);
    CHECK(v[slot::kCommonOverUoi] == 0.5);
    CHECK(v[slot::kCommonOverCandidate] == 0.25);
  }

  TEST_CASE("mention flags") {
    const auto log = rm::parse_chat_log("[10:00] <alice> hello\n[10:01] <bob> alice: hi\n");
    const auto v = rm::pair_features(log, 1, 0, {});
    CHECK(v[slot::kUoiMentionsCandidate] == 1.0);
    CHECK(v[slot::kCandidateMentionsUoi] == 0.0);
  }

  TEST_CASE("embedding pooling") {
    rm::EmbeddingTable table(2);
    table.insert("x", {1, 0});
    table.insert("y", {0, 1});
    const auto log = rm::parse_chat_log("[10:00] <a> x\n[10:01] <b> x y\n[10:02] <c> zz qq\n");
    SUBCASE("single token") {
      const auto v = rm::embedding_pool_features(log, 0, 0, table, 2);
      CHECK(v == std::vector<double>{1, 0, 1, 0, 1, 0, 1, 0});
    }
    SUBCASE("two tokens") {
      const auto v = rm::embedding_pool_features(log, 1, 0, table, 2);
      CHECK(std::vector<double>(v.begin(), v.begin() + 4) == std::vector<double>{1, 1, 0.5, 0.5});
    }
    SUBCASE("unknown tokens only") {
      const auto v = rm::embedding_pool_features(log, 2, 2, table, 2);
      CHECK(v == std::vector<double>(8, 0.0));
    }
    SUBCASE("dimension mismatch") {
      CHECK_THROWS_AS(rm::embedding_pool_features(log, 0, 0, table, 3), rm::ValidationError);
    }
    SUBCASE("full vector dimension") {
      const rm::FeatureConfig config{true, 2};
      CHECK(rm::pair_features(log, 1, 0, config, &table).size() == config.dimension());
    }
  }

  TEST_CASE("embedding files") {
    const auto table = rm::parse_embeddings("a 1 2 3\nb 4 5 6\n");
    CHECK(table.size() == 2);
    CHECK(table.dim() == 3);

    const auto dup = rm::parse_embeddings("a 1 2\na 3 4\n");
    CHECK(dup.size() == 1);
    CHECK(*dup.find("a") == std::vector<double>{3, 4});
    CHECK(dup.warnings.size() == 1);

    try {
      rm::parse_embeddings("");
      FAIL("expected an error");
    } catch (const rm::ParseError& e) {
      CHECK(std::string(e.what()).find("no embeddings") != std::string::npos);
    }
    try {
      rm::parse_embeddings("a 1 2\nb 1\n");
      FAIL("expected an error");
    } catch (const rm::ParseError& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("feature vectors are pure and bounded") {
    const auto corpus = rm::testing::make_separable_corpus(5, 1, 40, 6);
    const auto& log = corpus[0].log;
    for (std::size_t i = 0; i < log.size(); ++i) {
      for (std::size_t j = (i >= 9 ? i - 9 : 0); j <= i; ++j) {
        const auto v = rm::pair_features(log, i, j, {});
        CHECK(v == rm::pair_features(log, i, j, {}));
        CHECK(v.size() == rm::kBaseFeatureDim);
        CHECK(v[slot::kDistance] >= 0.0);
        CHECK(v[slot::kDistance] <= 0.1);
        CHECK(v[slot::kCommonOverUoi] >= 0.0);
        CHECK(v[slot::kCommonOverUoi] <= 1.0);
        CHECK(v[slot::kCommonOverCandidate] <= 1.0);
        for (double x : v) CHECK(std::isfinite(x));
      }
    }
  }
}
