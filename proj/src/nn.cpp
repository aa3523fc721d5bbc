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

#include "replymatch/nn.hpp"

namespace replymatch::nn {

void xavier_uniform(Eigen::VectorXd& flat, const Slot& s, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    flat[s.offset + k] = rng.uniform(-limit, limit);
  }
}

Adam::Adam(Eigen::Index size, AdamConfig config)
    : config_(config), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  ++t_;
  m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * grad;
  v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * grad.cwiseAbs2();
  const double bias1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  const double step = config_.learning_rate / bias1;
  params.array() -=
      step * m_.array() / ((v_.array() / bias2).sqrt() + config_.epsilon);
}

bool EarlyStopping::update(double metric) {
  ++evaluations_;
  if (!best_ || metric > *best_) {
    best_ = metric;
    best_evaluation_ = evaluations_;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

}  // namespace replymatch::nn
