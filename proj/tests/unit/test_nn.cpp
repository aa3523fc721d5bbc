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

#include <cmath>

#include "doctest.h"
#include "replymatch/nn.hpp"
#include "support/oracles.hpp"

namespace rm = replymatch;
namespace nn = replymatch::nn;

TEST_SUITE("nn") {
  TEST_CASE("parameter layout packs slots back to back") {
    nn::ParameterLayout layout;
    const auto a = layout.add(3, 2);
    const auto b = layout.add(4);
    CHECK(a.offset == 0);
    CHECK(b.offset == 6);
    CHECK(layout.total() == 10);
    Eigen::VectorXd flat = Eigen::VectorXd::LinSpaced(10, 0, 9);
    CHECK(nn::view(flat, a)(1, 1) == 4.0);  // column-major
    CHECK(nn::view(flat, b)(3, 0) == 9.0);
  }

  TEST_CASE("glorot initialisation stays inside its bound") {
    nn::ParameterLayout layout;
    const auto s = layout.add(20, 30);
    Eigen::VectorXd flat = Eigen::VectorXd::Zero(layout.total());
    rm::Rng rng(3);
    nn::xavier_uniform(flat, s, rng);
    CHECK(flat.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 50.0));
    CHECK(flat.cwiseAbs().maxCoeff() > 0.0);
  }

  TEST_CASE("softsign derivative") {
    // Zero is a kink of the second derivative, so it is checked exactly below
    // rather than by finite differences.
    CHECK(nn::softsign_grad(0.0) == 1.0);
    for (double a : {-3.0, -0.2, 0.7, 5.0}) {
      double x = a;
      const double fd = rm::testing::central_difference([&] { return nn::softsign(x); }, x);
      CHECK(rm::testing::relative_error(nn::softsign_grad(a), fd) < 1e-7);
    }
  }

  TEST_CASE("first adam step moves each weight by the learning rate") {
    nn::Adam adam(3, {0.1});
    Eigen::VectorXd p(3);
    p << 1.0, -1.0, 0.5;
    Eigen::VectorXd g(3);
    g << 2.0, -0.5, 0.0;
    adam.step(p, g);
    CHECK(p[0] == doctest::Approx(0.9).epsilon(1e-7));
    CHECK(p[1] == doctest::Approx(-0.9).epsilon(1e-7));
    CHECK(p[2] == 0.5);
  }

  TEST_CASE("adam minimises a quadratic") {
    nn::Adam adam(2, {0.05});
    Eigen::VectorXd p(2);
    p << 3.0, -2.0;
    for (int k = 0; k < 2000; ++k) {
      Eigen::VectorXd g = 2.0 * (p - Eigen::Vector2d(1.0, 0.5));
      adam.step(p, g);
    }
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-3));
  }

  TEST_CASE("patience of three stops three evaluations after the best") {
    nn::EarlyStopping stop(3);
    const double metrics[] = {0.1, 0.2, 0.3, 0.3, 0.4, 0.5, 0.6, 0.6, 0.55, 0.6};
    int evaluations = 0;
    for (double m : metrics) {
      stop.update(m);
      ++evaluations;
      if (stop.should_stop()) break;
    }
    CHECK(evaluations == 10);
    CHECK(stop.best_evaluation() == 7);
    CHECK(*stop.best() == 0.6);
  }

  TEST_CASE("ties do not count as improvement") {
    nn::EarlyStopping stop(1);
    CHECK(stop.update(0.5));
    CHECK_FALSE(stop.update(0.5));
    CHECK(stop.should_stop());
  }
}
