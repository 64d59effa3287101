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

#include "gesn/readout.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "gesn/error.hpp"
#include "gesn/kernels.hpp"

namespace gesn {
namespace {

// Below this reciprocal condition estimate the Cholesky factor is treated as
// a failed factorization.
constexpr double kMinRcond = 1e-14;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return llt.info() == Eigen::Success && llt.rcond() >= kMinRcond;
}

}  // namespace

Eigen::MatrixXd ReadoutModel::scores(const Eigen::MatrixXd& embeddings) const {
  if (embeddings.rows() != w_out.cols()) {
    throw Error("readout: embeddings have " + std::to_string(embeddings.rows()) +
                " units, model expects " + std::to_string(w_out.cols()));
  }
  Eigen::MatrixXd s = w_out * embeddings;
  s.colwise() += b_out;
  return s;
}

ReadoutModel fit_ridge(const Eigen::MatrixXd& embeddings,
                       std::span<const int> labels, int num_classes,
                       double lambda) {
  const Eigen::Index h = embeddings.rows();
  const Eigen::Index n = embeddings.cols();
  if (n < 1) throw Error("fit_ridge: no training nodes");
  if (labels.size() != static_cast<std::size_t>(n)) {
    throw Error("fit_ridge: " + std::to_string(labels.size()) + " labels for " +
                std::to_string(n) + " embeddings");
  }
  if (num_classes < 2) throw Error("fit_ridge: need at least two classes");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error("fit_ridge: lambda must be finite and >= 0");
  }
  if (!kernels::all_finite({embeddings.data(),
                            static_cast<std::size_t>(embeddings.size())})) {
    throw Error("fit_ridge: non-finite embeddings");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw Error("fit_ridge: label " + std::to_string(y) + " outside [0, " +
                  std::to_string(num_classes) + ")");
    }
  }

  // Normal equations of the augmented design [E; 1].
  Eigen::MatrixXd gram(h + 1, h + 1);
  gram.topLeftCorner(h, h).setZero();
  gram.topLeftCorner(h, h).selfadjointView<Eigen::Lower>().rankUpdate(embeddings);
  gram.topLeftCorner(h, h).triangularView<Eigen::StrictlyUpper>() =
      gram.topLeftCorner(h, h).transpose();
  const Eigen::VectorXd sums = embeddings.rowwise().sum();
  gram.block(0, h, h, 1) = sums;
  gram.block(h, 0, 1, h) = sums.transpose();
  gram(h, h) = static_cast<double>(n);
  gram.diagonal().head(h).array() += lambda;

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(h + 1, num_classes);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = labels[i];
    rhs.col(c).head(h) += embeddings.col(i);
    rhs(h, c) += 1.0;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (!factor_ok(llt)) {
    if (lambda == 0.0) {
      throw Error("fit_ridge: normal matrix is singular at lambda = 0; "
                  "use lambda > 0");
    }
    const double jitter =
        1e-10 * gram.diagonal().head(h).sum() / static_cast<double>(std::max<Eigen::Index>(h, 1));
    spdlog::warn("fit_ridge: Cholesky failed at lambda={}, retrying with "
                 "diagonal jitter {}",
                 lambda, jitter);
    gram.diagonal().array() += jitter;
    llt.compute(gram);
    if (!factor_ok(llt)) {
      throw Error("fit_ridge: normal matrix is not positive definite even "
                  "after jitter");
    }
  }
  const Eigen::MatrixXd coef = llt.solve(rhs);  // (H+1) x C

  ReadoutModel model;
  model.w_out = coef.topRows(h).transpose();
  model.b_out = coef.row(h).transpose();
  model.lambda = lambda;
  if (!model.w_out.allFinite() || !model.b_out.allFinite()) {
    throw Error("fit_ridge: solution is not finite");
  }
  return model;
}

std::vector<int> argmax_columns(const Eigen::MatrixXd& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.cols()));
  for (Eigen::Index j = 0; j < scores.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.rows(); ++c) {
      if (scores(c, j) > scores(best, j)) best = c;
    }
    out[j] = static_cast<int>(best);
  }
  return out;
}

std::vector<int> predict(const ReadoutModel& model,
                         const Eigen::MatrixXd& embeddings) {
  return argmax_columns(model.scores(embeddings));
}

double squared_loss(const ReadoutModel& model,
                    const Eigen::MatrixXd& embeddings,
                    std::span<const int> labels) {
  Eigen::MatrixXd residual = model.scores(embeddings);
  for (Eigen::Index j = 0; j < residual.cols(); ++j) residual(labels[j], j) -= 1.0;
  return residual.squaredNorm();
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.empty()) throw Error("accuracy: empty input");
  if (predicted.size() != truth.size()) {
    throw Error("accuracy: length mismatch");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    hits += predicted[i] == truth[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

BootstrapResult bootstrap_ci(std::span<const int> predicted,
                             std::span<const int> truth,
                             std::size_t num_resamples, double confidence,
                             std::uint64_t seed) {
  if (predicted.empty()) throw Error("bootstrap_ci: empty input");
  if (predicted.size() != truth.size()) {
    throw Error("bootstrap_ci: length mismatch");
  }
  if (num_resamples < 1) throw Error("bootstrap_ci: need at least one resample");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error("bootstrap_ci: confidence must lie in (0, 1)");
  }
  const std::size_t n = predicted.size();
  std::vector<unsigned char> hit(n);
  for (std::size_t i = 0; i < n; ++i) hit[i] = predicted[i] == truth[i];

  std::vector<double> acc(num_resamples);
  for (std::size_t r = 0; r < num_resamples; ++r) {
    std::mt19937_64 rng(mix(seed + r));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += hit[pick(rng)];
    acc[r] = static_cast<double>(hits) / static_cast<double>(n);
  }

  BootstrapResult result;
  result.num_resamples = num_resamples;
  result.confidence = confidence;
  result.seed = seed;
  double total = 0.0;
  for (double a : acc) total += a;
  result.mean_accuracy = total / static_cast<double>(num_resamples);
  std::sort(acc.begin(), acc.end());
  const double tail = (1.0 - confidence) / 2.0;
  result.ci_low = std::min(quantile_sorted(acc, tail), result.mean_accuracy);
  result.ci_high = std::max(quantile_sorted(acc, 1.0 - tail), result.mean_accuracy);
  return result;
}

}  // namespace gesn
