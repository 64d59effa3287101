// Copyright 2026 The GESN Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GESN_READOUT_HPP_
#define GESN_READOUT_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace gesn {

// Linear map y = W_out h + b_out from H-dimensional embeddings to C class
// scores.
struct ReadoutModel {
  Eigen::MatrixXd w_out;  // C x H
  Eigen::VectorXd b_out;  // C
  double lambda = 0.0;

  int num_classes() const { return static_cast<int>(w_out.rows()); }
  int num_units() const { return static_cast<int>(w_out.cols()); }
  // C x M class scores for H x M embeddings.
  Eigen::MatrixXd scores(const Eigen::MatrixXd& embeddings) const;
};

// Ridge regression on one-hot {0, 1} targets with an unpenalized bias,
// solved through the (H+1) x (H+1) normal equations by Cholesky.
//
// `embeddings` is H x n, one column per training node. At lambda == 0 a
// singular normal matrix is an Error; at lambda > 0 a failed factorization
// is retried once with 1e-10 * trace / H added to the diagonal.
ReadoutModel fit_ridge(const Eigen::MatrixXd& embeddings,
                       std::span<const int> labels, int num_classes,
                       double lambda);

// Column-wise argmax; ties go to the lowest class id.
std::vector<int> argmax_columns(const Eigen::MatrixXd& scores);

std::vector<int> predict(const ReadoutModel& model,
                         const Eigen::MatrixXd& embeddings);

// Sum over nodes and classes of (score - onehot)^2.
double squared_loss(const ReadoutModel& model,
                    const Eigen::MatrixXd& embeddings,
                    std::span<const int> labels);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

struct BootstrapResult {
  double mean_accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t num_resamples = 0;
  double confidence = 0.0;
  std::uint64_t seed = 0;
};

// Percentile bootstrap of the accuracy over test nodes. Resample r draws its
// indices from a generator seeded with seed + r, so the result does not
// depend on evaluation order. The interval is widened to contain the mean
// if percentile rounding would exclude it.
BootstrapResult bootstrap_ci(std::span<const int> predicted,
                             std::span<const int> truth,
                             std::size_t num_resamples, double confidence,
                             std::uint64_t seed);

}  // namespace gesn

#endif  // GESN_READOUT_HPP_
