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

#include "gesn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gesn/error.hpp"

namespace gesn {
namespace {

void build_csr(int n, std::span<const Arc> sorted_arcs, bool by_source,
               std::vector<std::int64_t>& offsets,
               std::vector<std::int32_t>& indices) {
  offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const Arc& a : sorted_arcs) ++offsets[(by_source ? a.src : a.dst) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  indices.resize(sorted_arcs.size());
  std::vector<std::int64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const Arc& a : sorted_arcs) {
    const int row = by_source ? a.src : a.dst;
    indices[cursor[row]++] = by_source ? a.dst : a.src;
  }
  for (int r = 0; r < n; ++r) {
    std::sort(indices.begin() + offsets[r], indices.begin() + offsets[r + 1]);
  }
}

// Union-find over weak connectivity.
class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // The smaller index becomes the root, so a root is its component's
    // minimum node.
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

 private:
  std::vector<int> parent_;
};

SparseGraph induced_subgraph(const SparseGraph& g,
                             const std::vector<int>& keep) {
  std::vector<int> remap(g.num_nodes(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = static_cast<int>(i);
  std::vector<Arc> arcs;
  for (int old : keep) {
    for (int dst : g.out_neighbors(old)) {
      if (remap[dst] >= 0) arcs.push_back({remap[old], remap[dst]});
    }
  }
  Eigen::MatrixXd features(keep.size(), g.num_features());
  std::vector<int> labels;
  std::vector<std::int64_t> ids;
  ids.reserve(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    features.row(static_cast<Eigen::Index>(i)) = g.features().row(keep[i]);
    ids.push_back(g.node_ids()[keep[i]]);
  }
  if (g.has_labels()) {
    labels.reserve(keep.size());
    for (int old : keep) labels.push_back(g.labels()[old]);
  }
  return SparseGraph(static_cast<int>(keep.size()), arcs, g.directed(),
                     std::move(features), std::move(labels), g.num_classes(),
                     std::move(ids));
}

}  // namespace

SparseGraph::SparseGraph(int num_nodes, std::span<const Arc> arcs,
                         bool directed, Eigen::MatrixXd features,
                         std::vector<int> labels, int num_classes,
                         std::vector<std::int64_t> node_ids) {
  if (num_nodes < 0) throw Error("SparseGraph: negative node count");
  if (features.rows() != num_nodes) {
    throw Error("SparseGraph: feature matrix has " +
                std::to_string(features.rows()) + " rows, expected " +
                std::to_string(num_nodes));
  }
  if (!labels.empty()) {
    if (labels.size() != static_cast<std::size_t>(num_nodes)) {
      throw Error("SparseGraph: " + std::to_string(labels.size()) +
                  " labels for " + std::to_string(num_nodes) + " nodes");
    }
    for (std::size_t v = 0; v < labels.size(); ++v) {
      if (labels[v] < 0 || labels[v] >= num_classes) {
        throw Error("SparseGraph: label " + std::to_string(labels[v]) +
                    " of node " + std::to_string(v) + " outside [0, " +
                    std::to_string(num_classes) + ")");
      }
    }
  }
  if (node_ids.empty()) {
    node_ids.resize(num_nodes);
    std::iota(node_ids.begin(), node_ids.end(), std::int64_t{0});
  } else if (node_ids.size() != static_cast<std::size_t>(num_nodes)) {
    throw Error("SparseGraph: node_ids length does not match node count");
  }

  auto s = std::make_shared<Structure>();
  s->num_nodes = num_nodes;
  s->directed = directed;

  std::vector<Arc> kept;
  kept.reserve(directed ? arcs.size() : 2 * arcs.size());
  for (const Arc& a : arcs) {
    if (a.src < 0 || a.src >= num_nodes || a.dst < 0 || a.dst >= num_nodes) {
      throw Error("SparseGraph: arc (" + std::to_string(a.src) + ", " +
                  std::to_string(a.dst) + ") has an endpoint outside [0, " +
                  std::to_string(num_nodes) + ")");
    }
    if (a.src == a.dst) {
      ++s->self_loops;
      continue;
    }
    kept.push_back(a);
  }
  {
    std::vector<Arc> raw = kept;
    std::sort(raw.begin(), raw.end());
    s->duplicates = static_cast<std::size_t>(
        raw.end() - std::unique(raw.begin(), raw.end()));
  }
  if (!directed) {
    const std::size_t m = kept.size();
    for (std::size_t i = 0; i < m; ++i) kept.push_back({kept[i].dst, kept[i].src});
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

  build_csr(num_nodes, kept, true, s->out_offsets, s->out_indices);
  build_csr(num_nodes, kept, false, s->in_offsets, s->in_indices);

  structure_ = std::move(s);
  features_ = std::make_shared<const Eigen::MatrixXd>(std::move(features));
  labels_ = std::make_shared<const std::vector<int>>(std::move(labels));
  num_classes_ = num_classes;
  node_ids_ =
      std::make_shared<const std::vector<std::int64_t>>(std::move(node_ids));
}

std::span<const std::int32_t> SparseGraph::out_neighbors(int v) const {
  const auto& s = *structure_;
  return {s.out_indices.data() + s.out_offsets[v],
          static_cast<std::size_t>(s.out_offsets[v + 1] - s.out_offsets[v])};
}

std::span<const std::int32_t> SparseGraph::in_neighbors(int v) const {
  const auto& s = *structure_;
  return {s.in_indices.data() + s.in_offsets[v],
          static_cast<std::size_t>(s.in_offsets[v + 1] - s.in_offsets[v])};
}

bool SparseGraph::has_arc(int src, int dst) const {
  const auto row = out_neighbors(src);
  return std::binary_search(row.begin(), row.end(), dst);
}

std::vector<Arc> SparseGraph::arcs() const {
  std::vector<Arc> out;
  out.reserve(num_arcs());
  for (int v = 0; v < num_nodes(); ++v) {
    for (int u : out_neighbors(v)) out.push_back({v, u});
  }
  return out;
}

SparseGraph SparseGraph::with_features(Eigen::MatrixXd features) const {
  if (features.rows() != num_nodes()) {
    throw Error("with_features: feature matrix has " +
                std::to_string(features.rows()) + " rows, expected " +
                std::to_string(num_nodes()));
  }
  SparseGraph copy = *this;
  copy.features_ = std::make_shared<const Eigen::MatrixXd>(std::move(features));
  return copy;
}

CsrMatrix SparseGraph::adjacency() const {
  const auto& s = *structure_;
  return CsrMatrix(s.num_nodes, s.num_nodes, s.out_offsets, s.out_indices,
                   std::vector<double>(s.out_indices.size(), 1.0));
}

double spectral_radius(const SparseGraph& g, double tol,
                       std::size_t max_iters) {
  if (g.num_nodes() == 0) throw Error("spectral_radius: empty graph");
  if (!(tol > 0.0)) throw Error("spectral_radius: tol must be positive");
  const PowerIterationOptions opts{tol, max_iters};
  const CsrMatrix a = g.adjacency();
  return g.directed() ? nonnegative_spectral_radius(a, opts)
                      : symmetric_spectral_radius(a, opts);
}

std::size_t count_undirected_edges(const SparseGraph& g) {
  std::size_t pairs = 0;
  for (int v = 0; v < g.num_nodes(); ++v) {
    for (int u : g.out_neighbors(v)) {
      // count (v, u) once: from the smaller endpoint, or from the only side
      // that stores it
      if (v < u || !g.has_arc(u, v)) ++pairs;
    }
  }
  return pairs;
}

double edge_homophily(const SparseGraph& g) {
  if (!g.has_labels()) throw Error("edge_homophily: graph has no labels");
  std::size_t pairs = 0;
  std::size_t same = 0;
  const auto labels = g.labels();
  for (int v = 0; v < g.num_nodes(); ++v) {
    for (int u : g.out_neighbors(v)) {
      if (v < u || !g.has_arc(u, v)) {
        ++pairs;
        if (labels[v] == labels[u]) ++same;
      }
    }
  }
  if (pairs == 0) throw Error("edge_homophily: graph has no edges");
  return static_cast<double>(same) / static_cast<double>(pairs);
}

SparseGraph largest_connected_component(const SparseGraph& g) {
  const int n = g.num_nodes();
  if (n == 0) return g;
  DisjointSets sets(n);
  for (int v = 0; v < n; ++v) {
    for (int u : g.out_neighbors(v)) sets.unite(v, u);
  }
  std::vector<int> size(n, 0);
  for (int v = 0; v < n; ++v) ++size[sets.find(v)];
  // Roots are component minima, so scanning roots in increasing order and
  // keeping the first maximum applies the smallest-index tie-break.
  int best = -1;
  for (int v = 0; v < n; ++v) {
    if (sets.find(v) == v && (best < 0 || size[v] > size[best])) best = v;
  }
  if (size[best] == n) return g;
  std::vector<int> keep;
  keep.reserve(size[best]);
  for (int v = 0; v < n; ++v) {
    if (sets.find(v) == best) keep.push_back(v);
  }
  return induced_subgraph(g, keep);
}

SparseGraph to_undirected(const SparseGraph& g) {
  if (!g.directed()) return g;
  const auto arcs = g.arcs();
  std::vector<int> labels(g.labels().begin(), g.labels().end());
  std::vector<std::int64_t> ids(g.node_ids().begin(), g.node_ids().end());
  return SparseGraph(g.num_nodes(), arcs, false, g.features(),
                     std::move(labels), g.num_classes(), std::move(ids));
}

CsrMatrix normalized_adjacency(const SparseGraph& g) {
  if (g.directed()) {
    throw Error("normalized_adjacency: graph must be undirected");
  }
  const int n = g.num_nodes();
  std::vector<double> inv_sqrt_deg(n);
  for (int v = 0; v < n; ++v) {
    inv_sqrt_deg[v] =
        1.0 / std::sqrt(static_cast<double>(g.out_neighbors(v).size() + 1));
  }
  std::vector<std::int64_t> offsets(static_cast<std::size_t>(n) + 1, 0);
  std::vector<std::int32_t> indices;
  std::vector<double> values;
  indices.reserve(g.num_arcs() + n);
  values.reserve(g.num_arcs() + n);
  for (int v = 0; v < n; ++v) {
    bool diagonal_done = false;
    for (int u : g.out_neighbors(v)) {
      if (!diagonal_done && u > v) {
        indices.push_back(v);
        values.push_back(inv_sqrt_deg[v] * inv_sqrt_deg[v]);
        diagonal_done = true;
      }
      indices.push_back(u);
      values.push_back(inv_sqrt_deg[v] * inv_sqrt_deg[u]);
    }
    if (!diagonal_done) {
      indices.push_back(v);
      values.push_back(inv_sqrt_deg[v] * inv_sqrt_deg[v]);
    }
    offsets[v + 1] = static_cast<std::int64_t>(indices.size());
  }
  return CsrMatrix(n, n, std::move(offsets), std::move(indices),
                   std::move(values));
}

GraphStats graph_stats(const SparseGraph& g) {
  GraphStats stats;
  stats.num_nodes = g.num_nodes();
  stats.num_edges = count_undirected_edges(g);
  stats.num_arcs = g.num_arcs();
  stats.num_features = g.num_features();
  stats.num_classes = g.num_classes();
  stats.spectral_radius = spectral_radius(g);
  stats.edge_homophily = edge_homophily(g);
  return stats;
}

}  // namespace gesn
