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

#ifndef GESN_SENSITIVITY_HPP_
#define GESN_SENSITIVITY_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "gesn/graph.hpp"
#include "gesn/linalg.hpp"
#include "gesn/reservoir.hpp"

// Measurements of how strongly a node's representation reacts to the input
// features of another node, for an untrained GCN and for the reservoir.
namespace gesn::sensitivity {

// Untrained GCN: h(l) = relu(A_hat h(l-1) W(l)^T), h(0) = X.
struct GcnStack {
  std::vector<Eigen::MatrixXd> layer_weights;  // W(1): H x X, then H x H
  CsrMatrix normalized_adjacency;              // N x N

  int depth() const { return static_cast<int>(layer_weights.size()); }
};

// Uniform[-scale, scale] weights over the normalized adjacency of g.
GcnStack random_gcn_stack(const SparseGraph& g, int hidden, int depth,
                          std::uint64_t seed, double scale = 1.0);

// N x H node representations after all layers.
Eigen::MatrixXd gcn_forward(const GcnStack& stack,
                            const Eigen::MatrixXd& features);

// (M^depth)(v, v_src) via `depth` sparse products against e_{v_src}.
double adjacency_power_entry(const CsrMatrix& m, int depth, int v, int v_src);

// Black-box map from an N x X feature matrix to N x H node states.
using EmbedFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

EmbedFn gcn_embedding(const GcnStack& stack);
// K-step reservoir states (transposed to node-major).
EmbedFn reservoir_embedding(const SparseGraph& g, const ReservoirWeights& w,
                            const ReservoirConfig& cfg);

// d(state of v) / d(x_{v_src}) by central differences, H x X.
Eigen::MatrixXd finite_difference_jacobian(const EmbedFn& embed,
                                           const Eigen::MatrixXd& features,
                                           int v, int v_src,
                                           double epsilon = 1e-5);

// Operator 2-norm of finite_difference_jacobian.
double empirical_jacobian_norm(const EmbedFn& embed,
                               const Eigen::MatrixXd& features, int v,
                               int v_src, double epsilon = 1e-5);
double empirical_jacobian_norm(const EmbedFn& embed, const SparseGraph& g,
                               int v, int v_src, double epsilon = 1e-5);

struct SensitivityReport {
  int source = 0;  // v_src
  int target = 0;  // v
  int depth = 0;
  double jacobian_norm = 0.0;
  double bound = 0.0;           // prod_l |W(l)|_2 * adjacency_mass
  double adjacency_mass = 0.0;  // (A_hat^depth)(v, v_src)
};

SensitivityReport sensitivity_report(const SparseGraph& g,
                                     const GcnStack& stack, int v, int v_src,
                                     double epsilon = 1e-5);

// Header: source,target,depth,jacobian_norm,bound,adjacency_mass
void write_report_csv(std::ostream& out,
                      std::span<const SensitivityReport> reports);

}  // namespace gesn::sensitivity

#endif  // GESN_SENSITIVITY_HPP_
