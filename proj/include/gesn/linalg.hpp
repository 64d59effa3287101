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

#ifndef GESN_LINALG_HPP_
#define GESN_LINALG_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace gesn {

// Row-compressed sparse matrix with real values. Rows are sorted by column.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(int rows, int cols, std::vector<std::int64_t> offsets,
            std::vector<std::int32_t> indices, std::vector<double> values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return indices_.size(); }

  std::span<const std::int32_t> row_indices(int r) const;
  std::span<const double> row_values(int r) const;
  std::span<const std::int64_t> offsets() const { return offsets_; }

  // y = M x
  void multiply(std::span<const double> x, std::span<double> y) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
  // M X for a dense right-hand side with cols() rows.
  Eigen::MatrixXd operator*(const Eigen::MatrixXd& x) const;

  double coeff(int r, int c) const;
  Eigen::MatrixXd to_dense() const;
  bool is_symmetric(double tol = 0.0) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int32_t> indices_;
  std::vector<double> values_;
};

struct PowerIterationOptions {
  double tol = 1e-8;
  std::size_t max_iters = 10'000;
};

// Largest |eigenvalue| of a symmetric matrix. Iterates x <- Mx/|Mx| from the
// all-ones vector and reports |Mx| (the Rayleigh quotient of M^2 under the
// square root), which is insensitive to the +-rho pairing of bipartite
// structure. Throws ConvergenceError with the last estimate.
double symmetric_spectral_radius(const CsrMatrix& m,
                                 const PowerIterationOptions& opts = {});

// Perron root of an entrywise nonnegative square matrix: the largest root
// over its strongly connected blocks, each found by power iteration on
// B + I with the 1-norm ratio. Throws ConvergenceError.
double nonnegative_spectral_radius(const CsrMatrix& m,
                                   const PowerIterationOptions& opts = {});

// Spectral radius of a dense (generally non-symmetric) square matrix from its
// full eigenvalue spectrum (LAPACK dgeev, eigenvalues only).
double dense_spectral_radius(const Eigen::MatrixXd& m);

// Operator 2-norm by power iteration on M^T M. A zero matrix gives 0.
double spectral_norm(const Eigen::MatrixXd& m, double rel_tol = 1e-13,
                     std::size_t max_iters = 100'000);

}  // namespace gesn

#endif  // GESN_LINALG_HPP_
