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

// Small building blocks shared by the scorer and the capacity regressor:
// flat parameter vectors with matrix views, Adam, and patience-based early
// stopping.

#ifndef REPLYMATCH_NN_HPP_
#define REPLYMATCH_NN_HPP_

#include <cmath>
#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "replymatch/random.hpp"

namespace replymatch::nn {

/// Location of one matrix (or vector, cols == 1) inside a flat vector.
struct Slot {
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 1;

  Eigen::Index size() const { return rows * cols; }
};

class ParameterLayout {
 public:
  Slot add(Eigen::Index rows, Eigen::Index cols = 1) {
    Slot slot{total_, rows, cols};
    total_ += rows * cols;
    return slot;
  }
  Eigen::Index total() const { return total_; }

 private:
  Eigen::Index total_ = 0;
};

inline Eigen::Map<Eigen::MatrixXd> view(Eigen::VectorXd& flat, const Slot& s) {
  return {flat.data() + s.offset, s.rows, s.cols};
}
inline Eigen::Map<const Eigen::MatrixXd> view(const Eigen::VectorXd& flat, const Slot& s) {
  return {flat.data() + s.offset, s.rows, s.cols};
}

/// Glorot-uniform fill of one slot.
void xavier_uniform(Eigen::VectorXd& flat, const Slot& s, Rng& rng);

inline double softsign(double a) { return a / (1.0 + std::abs(a)); }
inline double softsign_grad(double a) {
  const double d = 1.0 + std::abs(a);
  return 1.0 / (d * d);
}

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(Eigen::Index size, AdamConfig config = {});

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  long steps() const { return t_; }

 private:
  AdamConfig config_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  long t_ = 0;
};

/// Tracks a higher-is-better validation metric. Only strict improvements
/// reset the counter, so the first evaluation reaching the best value is
/// the one kept.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}

  /// Records one evaluation; returns true when it is a new best.
  bool update(double metric);
  bool should_stop() const { return since_best_ >= patience_; }

  int evaluations() const { return evaluations_; }
  /// 1-based index of the best evaluation, 0 before any.
  int best_evaluation() const { return best_evaluation_; }
  std::optional<double> best() const { return best_; }

 private:
  int patience_;
  int evaluations_ = 0;
  int best_evaluation_ = 0;
  int since_best_ = 0;
  std::optional<double> best_;
};

}  // namespace replymatch::nn

#endif  // REPLYMATCH_NN_HPP_
