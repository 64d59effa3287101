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

#ifndef GESN_GRAPH_HPP_
#define GESN_GRAPH_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "gesn/linalg.hpp"

namespace gesn {

struct Arc {
  std::int32_t src;
  std::int32_t dst;
  friend bool operator==(const Arc&, const Arc&) = default;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

// Immutable CSR graph with node features and labels.
//
// The arc set never contains self-loops or duplicates: both are dropped at
// construction (and counted). With directed == false every input arc (u, v)
// also contributes (v, u), so undirected edges may be listed once or twice.
// Copies share the structure.
class SparseGraph {
 public:
  // `features` is N x X (row v is x_v). `labels` is empty (unlabelled) or
  // has N entries in [0, num_classes). `node_ids` defaults to 0..N-1.
  SparseGraph(int num_nodes, std::span<const Arc> arcs, bool directed,
              Eigen::MatrixXd features, std::vector<int> labels,
              int num_classes, std::vector<std::int64_t> node_ids = {});

  int num_nodes() const { return structure_->num_nodes; }
  std::size_t num_arcs() const { return structure_->out_indices.size(); }
  bool directed() const { return structure_->directed; }

  // Row v of the stored CSR: targets of arcs v -> u, sorted.
  std::span<const std::int32_t> out_neighbors(int v) const;
  // Sources of arcs u -> v, sorted. Equal to out_neighbors when undirected.
  std::span<const std::int32_t> in_neighbors(int v) const;
  std::span<const std::int64_t> row_offsets() const {
    return structure_->out_offsets;
  }
  std::span<const std::int32_t> column_indices() const {
    return structure_->out_indices;
  }
  bool has_arc(int src, int dst) const;
  std::vector<Arc> arcs() const;

  const Eigen::MatrixXd& features() const { return *features_; }
  int num_features() const { return static_cast<int>(features_->cols()); }
  bool has_labels() const { return !labels_->empty(); }
  std::span<const int> labels() const { return *labels_; }
  int num_classes() const { return num_classes_; }
  std::span<const std::int64_t> node_ids() const { return *node_ids_; }

  std::size_t dropped_self_loops() const { return structure_->self_loops; }
  std::size_t dropped_duplicates() const { return structure_->duplicates; }

  // Same structure and labels, new N x X' feature matrix.
  SparseGraph with_features(Eigen::MatrixXd features) const;

  // 0/1 adjacency with A(u, v) = 1 for each arc u -> v.
  CsrMatrix adjacency() const;

 private:
  struct Structure {
    int num_nodes = 0;
    bool directed = false;
    std::vector<std::int64_t> out_offsets;
    std::vector<std::int32_t> out_indices;
    std::vector<std::int64_t> in_offsets;
    std::vector<std::int32_t> in_indices;
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;
  };

  SparseGraph() = default;

  std::shared_ptr<const Structure> structure_;
  std::shared_ptr<const Eigen::MatrixXd> features_;
  std::shared_ptr<const std::vector<int>> labels_;
  int num_classes_ = 0;
  std::shared_ptr<const std::vector<std::int64_t>> node_ids_;
};

struct GraphStats {
  int num_nodes = 0;
  std::size_t num_edges = 0;  // unordered pairs, each counted once
  std::size_t num_arcs = 0;   // stored directed arcs
  double spectral_radius = 0.0;
  double edge_homophily = 0.0;
  int num_features = 0;
  int num_classes = 0;
};

// rho(A) of the stored arc structure. Undirected graphs use the symmetric
// power iteration, directed ones the nonnegative (Perron) variant; both start
// from the all-ones vector. Empty graph -> Error; ConvergenceError otherwise.
double spectral_radius(const SparseGraph& g, double tol = 1e-8,
                       std::size_t max_iters = 10'000);

// Fraction of unordered edges whose endpoints share a label.
double edge_homophily(const SparseGraph& g);

// Number of unordered node pairs joined by at least one arc.
std::size_t count_undirected_edges(const SparseGraph& g);

// Induced subgraph on the largest weakly connected component, nodes kept in
// their original relative order. Ties go to the component holding the
// smallest node index.
SparseGraph largest_connected_component(const SparseGraph& g);

SparseGraph to_undirected(const SparseGraph& g);

// D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I. Requires an
// undirected graph.
CsrMatrix normalized_adjacency(const SparseGraph& g);

GraphStats graph_stats(const SparseGraph& g);

}  // namespace gesn

#endif  // GESN_GRAPH_HPP_
