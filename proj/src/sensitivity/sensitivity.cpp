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

#include "gesn/sensitivity.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "gesn/error.hpp"

namespace gesn::sensitivity {
namespace {

void check_node(int node, int n, const char* what) {
  if (node < 0 || node >= n) {
    throw Error(std::string(what) + " node " + std::to_string(node) +
                " outside [0, " + std::to_string(n) + ")");
  }
}

}  // namespace

GcnStack random_gcn_stack(const SparseGraph& g, int hidden, int depth,
                          std::uint64_t seed, double scale) {
  if (depth < 1) throw Error("random_gcn_stack: depth must be >= 1");
  if (hidden < 1) throw Error("random_gcn_stack: hidden width must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  GcnStack stack;
  stack.normalized_adjacency = normalized_adjacency(g);
  int in = g.num_features();
  for (int l = 0; l < depth; ++l) {
    Eigen::MatrixXd w(hidden, in);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = unif(rng);
    }
    stack.layer_weights.push_back(std::move(w));
    in = hidden;
  }
  return stack;
}

Eigen::MatrixXd gcn_forward(const GcnStack& stack,
                            const Eigen::MatrixXd& features) {
  if (stack.layer_weights.empty()) throw Error("gcn_forward: no layers");
  const auto& adj = stack.normalized_adjacency;
  if (adj.rows() != adj.cols() || adj.rows() != features.rows()) {
    throw Error("gcn_forward: adjacency is " + std::to_string(adj.rows()) +
                "x" + std::to_string(adj.cols()) + " but features have " +
                std::to_string(features.rows()) + " rows");
  }
  Eigen::MatrixXd h = features;
  for (std::size_t l = 0; l < stack.layer_weights.size(); ++l) {
    const auto& w = stack.layer_weights[l];
    if (w.cols() != h.cols()) {
      throw Error("gcn_forward: layer " + std::to_string(l + 1) + " expects " +
                  std::to_string(w.cols()) + " inputs, got " +
                  std::to_string(h.cols()));
    }
    h = (adj * Eigen::MatrixXd(h * w.transpose())).cwiseMax(0.0);
  }
  return h;
}

double adjacency_power_entry(const CsrMatrix& m, int depth, int v, int v_src) {
  if (m.rows() != m.cols()) throw Error("adjacency_power_entry: not square");
  if (depth < 0) throw Error("adjacency_power_entry: depth must be >= 0");
  check_node(v, m.rows(), "target");
  check_node(v_src, m.rows(), "source");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m.rows());
  x[v_src] = 1.0;
  Eigen::VectorXd y(m.rows());
  for (int l = 0; l < depth; ++l) {
    m.multiply({x.data(), static_cast<std::size_t>(x.size())},
               {y.data(), static_cast<std::size_t>(y.size())});
    x.swap(y);
  }
  return x[v];
}

EmbedFn gcn_embedding(const GcnStack& stack) {
  return [stack](const Eigen::MatrixXd& features) {
    return gcn_forward(stack, features);
  };
}

EmbedFn reservoir_embedding(const SparseGraph& g, const ReservoirWeights& w,
                            const ReservoirConfig& cfg) {
  return [g, w, cfg](const Eigen::MatrixXd& features) {
    const SparseGraph perturbed = g.with_features(features);
    return Eigen::MatrixXd(compute_embeddings(perturbed, w, cfg).states.transpose());
  };
}

Eigen::MatrixXd finite_difference_jacobian(const EmbedFn& embed,
                                           const Eigen::MatrixXd& features,
                                           int v, int v_src, double epsilon) {
  if (!(epsilon > 0.0)) throw Error("finite differences: epsilon must be > 0");
  const int n = static_cast<int>(features.rows());
  check_node(v, n, "target");
  check_node(v_src, n, "source");
  const Eigen::Index x_dim = features.cols();
  Eigen::MatrixXd jac;
  Eigen::MatrixXd shifted = features;
  for (Eigen::Index j = 0; j < x_dim; ++j) {
    const double base = features(v_src, j);
    shifted(v_src, j) = base + epsilon;
    const Eigen::VectorXd plus = embed(shifted).row(v).transpose();
    shifted(v_src, j) = base - epsilon;
    const Eigen::VectorXd minus = embed(shifted).row(v).transpose();
    shifted(v_src, j) = base;
    if (j == 0) jac.resize(plus.size(), x_dim);
    jac.col(j) = (plus - minus) / (2.0 * epsilon);
  }
  if (!jac.allFinite()) throw Error("finite differences: non-finite Jacobian");
  return jac;
}

double empirical_jacobian_norm(const EmbedFn& embed,
                               const Eigen::MatrixXd& features, int v,
                               int v_src, double epsilon) {
  if (features.cols() == 0) return 0.0;
  return spectral_norm(
      finite_difference_jacobian(embed, features, v, v_src, epsilon));
}

double empirical_jacobian_norm(const EmbedFn& embed, const SparseGraph& g,
                               int v, int v_src, double epsilon) {
  return empirical_jacobian_norm(embed, g.features(), v, v_src, epsilon);
}

SensitivityReport sensitivity_report(const SparseGraph& g,
                                     const GcnStack& stack, int v, int v_src,
                                     double epsilon) {
  SensitivityReport report;
  report.source = v_src;
  report.target = v;
  report.depth = stack.depth();
  report.adjacency_mass =
      adjacency_power_entry(stack.normalized_adjacency, stack.depth(), v, v_src);
  double lipschitz = 1.0;
  for (const auto& w : stack.layer_weights) lipschitz *= spectral_norm(w);
  report.bound = lipschitz * report.adjacency_mass;
  report.jacobian_norm =
      empirical_jacobian_norm(gcn_embedding(stack), g, v, v_src, epsilon);
  return report;
}

void write_report_csv(std::ostream& out,
                      std::span<const SensitivityReport> reports) {
  out << "source,target,depth,jacobian_norm,bound,adjacency_mass\n";
  const auto old_precision = out.precision(17);
  for (const auto& r : reports) {
    out << r.source << ',' << r.target << ',' << r.depth << ','
        << r.jacobian_norm << ',' << r.bound << ',' << r.adjacency_mass << '\n';
  }
  out.precision(old_precision);
}

}  // namespace gesn::sensitivity
