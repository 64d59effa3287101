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

#include "gesn/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gesn/error.hpp"
#include "gesn/kernels.hpp"

namespace gesn {

CsrMatrix::CsrMatrix(int rows, int cols, std::vector<std::int64_t> offsets,
                     std::vector<std::int32_t> indices,
                     std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      offsets_(std::move(offsets)),
      indices_(std::move(indices)),
      values_(std::move(values)) {
  if (rows < 0 || cols < 0) throw Error("CsrMatrix: negative dimension");
  if (offsets_.size() != static_cast<std::size_t>(rows) + 1 ||
      offsets_.front() != 0 ||
      offsets_.back() != static_cast<std::int64_t>(indices_.size()) ||
      indices_.size() != values_.size()) {
    throw Error("CsrMatrix: inconsistent offsets/indices/values");
  }
  for (int r = 0; r < rows; ++r) {
    if (offsets_[r] > offsets_[r + 1]) {
      throw Error("CsrMatrix: offsets must be non-decreasing");
    }
    for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      if (indices_[k] < 0 || indices_[k] >= cols) {
        throw Error("CsrMatrix: column index out of range in row " +
                    std::to_string(r));
      }
      if (k > offsets_[r] && indices_[k] <= indices_[k - 1]) {
        throw Error("CsrMatrix: row " + std::to_string(r) +
                    " is not strictly sorted");
      }
    }
  }
}

std::span<const std::int32_t> CsrMatrix::row_indices(int r) const {
  return {indices_.data() + offsets_[r],
          static_cast<std::size_t>(offsets_[r + 1] - offsets_[r])};
}

std::span<const double> CsrMatrix::row_values(int r) const {
  return {values_.data() + offsets_[r],
          static_cast<std::size_t>(offsets_[r + 1] - offsets_[r])};
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      sum += values_[k] * x[indices_[k]];
    }
    y[r] = sum;
  }
}

Eigen::VectorXd CsrMatrix::operator*(const Eigen::VectorXd& x) const {
  if (x.size() != cols_) throw Error("CsrMatrix: dimension mismatch");
  Eigen::VectorXd y(rows_);
  multiply({x.data(), static_cast<std::size_t>(x.size())},
           {y.data(), static_cast<std::size_t>(y.size())});
  return y;
}

Eigen::MatrixXd CsrMatrix::operator*(const Eigen::MatrixXd& x) const {
  if (x.rows() != cols_) throw Error("CsrMatrix: dimension mismatch");
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(rows_, x.cols());
  for (int r = 0; r < rows_; ++r) {
    for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      y.row(r) += values_[k] * x.row(indices_[k]);
    }
  }
  return y;
}

double CsrMatrix::coeff(int r, int c) const {
  const auto idx = row_indices(r);
  const auto it = std::lower_bound(idx.begin(), idx.end(), c);
  if (it == idx.end() || *it != c) return 0.0;
  return row_values(r)[it - idx.begin()];
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      dense(r, indices_[k]) = values_[k];
    }
  }
  return dense;
}

bool CsrMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (int r = 0; r < rows_; ++r) {
    for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      if (std::abs(coeff(indices_[k], r) - values_[k]) > tol) return false;
    }
  }
  return true;
}

double symmetric_spectral_radius(const CsrMatrix& m,
                                 const PowerIterationOptions& opts) {
  const int n = m.rows();
  if (n == 0 || m.cols() != n) {
    throw Error("spectral radius needs a nonempty square matrix");
  }
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(n));
  Eigen::VectorXd y(n);
  double previous = -1.0;
  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    m.multiply(std::span(x.data(), static_cast<std::size_t>(x.size())), std::span(y.data(), static_cast<std::size_t>(y.size())));
    const double estimate = std::sqrt(kernels::dot(
        std::span(y.data(), static_cast<std::size_t>(y.size())), std::span(y.data(), static_cast<std::size_t>(y.size()))));
    if (estimate == 0.0) return 0.0;
    if (std::abs(estimate - previous) < opts.tol) return estimate;
    previous = estimate;
    x = y / estimate;
  }
  throw ConvergenceError("power iteration did not converge within " +
                             std::to_string(opts.max_iters) +
                             " iterations (last estimate " +
                             std::to_string(previous) + ")",
                         previous, opts.max_iters);
}

namespace {

double shifted_power_radius(const CsrMatrix& m, const PowerIterationOptions& opts) {
  const int n = m.rows();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd y(n);
  double previous = -1.0;
  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    m.multiply(std::span(x.data(), static_cast<std::size_t>(x.size())),
               std::span(y.data(), static_cast<std::size_t>(y.size())));
    y += x;
    const double norm1 = y.sum();
    const double estimate = norm1 - 1.0;
    if (std::abs(estimate - previous) < opts.tol) return std::max(estimate, 0.0);
    previous = estimate;
    x = y / norm1;
  }
  throw ConvergenceError("shifted power iteration did not converge within " +
                             std::to_string(opts.max_iters) + " iterations",
                         previous, opts.max_iters);
}

// Strongly connected components of the sparsity pattern (iterative Tarjan).
std::vector<std::vector<int>> strong_components(const CsrMatrix& m) {
  const int n = m.rows();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> frames;
  std::vector<std::vector<int>> components;
  int counter = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    frames.emplace_back(root, 0);
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next == 0 && index[v] < 0) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      const auto out = m.row_indices(v);
      if (next < out.size()) {
        const int u = out[next++];
        if (index[u] < 0) {
          frames.emplace_back(u, 0);
        } else if (on_stack[u]) {
          low[v] = std::min(low[v], index[u]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<int> component;
        int u;
        do {
          u = stack.back();
          stack.pop_back();
          on_stack[u] = 0;
          component.push_back(u);
        } while (u != v);
        components.push_back(std::move(component));
      }
      const int finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const int parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return components;
}

}  // namespace

double nonnegative_spectral_radius(const CsrMatrix& m,
                                   const PowerIterationOptions& opts) {
  const int n = m.rows();
  if (n == 0 || m.cols() != n) {
    throw Error("spectral radius needs a nonempty square matrix");
  }
  double radius = 0.0;
  std::vector<int> local(n, -1);
  for (auto& component : strong_components(m)) {
    if (component.size() == 1) {
      radius = std::max(radius, std::abs(m.coeff(component[0], component[0])));
      continue;
    }
    std::sort(component.begin(), component.end());
    for (std::size_t i = 0; i < component.size(); ++i) {
      local[component[i]] = static_cast<int>(i);
    }
    std::vector<std::int64_t> offsets{0};
    std::vector<std::int32_t> indices;
    std::vector<double> values;
    for (int v : component) {
      const auto cols = m.row_indices(v);
      const auto vals = m.row_values(v);
      for (std::size_t e = 0; e < cols.size(); ++e) {
        if (local[cols[e]] < 0) continue;
        indices.push_back(local[cols[e]]);
        values.push_back(vals[e]);
      }
      offsets.push_back(static_cast<std::int64_t>(indices.size()));
    }
    const int size = static_cast<int>(component.size());
    const CsrMatrix block(size, size, std::move(offsets), std::move(indices),
                          std::move(values));
    radius = std::max(radius, shifted_power_radius(block, opts));
    for (int v : component) local[v] = -1;
  }
  return radius;
}

double dense_spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error("dense spectral radius needs a nonempty square matrix");
  }
  const lapack_int n = static_cast<lapack_int>(m.rows());
  if (n == 1) return std::abs(m(0, 0));
  Eigen::MatrixXd work = m;  // dgeev overwrites its input
  std::vector<double> wr(n);
  std::vector<double> wi(n);
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(),
                    wi.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw Error("dgeev failed with info=" + std::to_string(info));
  }
  double radius = 0.0;
  for (lapack_int i = 0; i < n; ++i) {
    radius = std::max(radius, std::hypot(wr[i], wi[i]));
  }
  return radius;
}

double spectral_norm(const Eigen::MatrixXd& m, double rel_tol,
                     std::size_t max_iters) {
  if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  // Fixed pseudo-random start; all-ones can be orthogonal to the top
  // singular vector for structured matrices.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd x(m.cols());
  for (auto& v : x) v = unif(rng);
  x.normalize();
  double previous = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd y = m * x;
    const double estimate = y.norm();
    Eigen::VectorXd z = m.transpose() * y;
    const double zn = z.norm();
    if (zn == 0.0) return estimate;
    x = z / zn;
    if (std::abs(estimate - previous) <= rel_tol * estimate) {
      return std::max(estimate, std::sqrt(zn));
    }
    previous = estimate;
  }
  throw ConvergenceError("spectral norm power iteration did not converge",
                         previous, max_iters);
}

}  // namespace gesn
