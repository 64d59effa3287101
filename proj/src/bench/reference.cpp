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

#include <algorithm>
#include <cctype>
#include <cmath>

#include "gesn/bench.hpp"

namespace gesn::bench {

const std::vector<DatasetReference>& reference_datasets() {
  using enum EdgeConvention;
  static const std::vector<DatasetReference> kTable = {
      {"texas", 0.11, 183, 295, kUnorderedPairs, 2.56, 1703, 5, 84.3, 73.96},
      {"wisconsin", 0.21, 251, 466, kUnorderedPairs, 2.88, 1703, 5, 83.3, 77.76},
      {"actor", 0.22, 7600, 26752, kUnorderedPairs, 9.99, 932, 5, 34.5, 35.07},
      {"squirrel", 0.22, 5201, 198493, kUnorderedPairs, 138.60, 2089, 5, 71.2, 42.70},
      {"chameleon", 0.23, 2277, 31421, kUnorderedPairs, 61.90, 2089, 5, 76.2, 50.19},
      {"cornell", 0.30, 183, 280, kUnorderedPairs, 2.68, 1703, 5, 81.1, 69.75},
      {"citeseer", 0.74, 3327, 9104, kArcs, 13.74, 3703, 6, 74.5, std::nullopt},
      {"pubmed", 0.80, 19717, 88648, kArcs, 23.24, 500, 3, 89.2, std::nullopt},
      {"cora", 0.81, 2708, 10556, kArcs, 14.39, 1433, 7, 86.0, std::nullopt},
  };
  return kTable;
}

const DatasetReference* find_reference(const std::string& name) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const DatasetReference& ref : reference_datasets()) {
    if (ref.name == key) return &ref;
  }
  return nullptr;
}

StatsComparison compare_stats(const GraphStats& stats,
                              const DatasetReference& ref) {
  StatsComparison c;
  c.edges_compared = ref.edge_convention == EdgeConvention::kArcs
                         ? stats.num_arcs
                         : stats.num_edges;
  c.nodes = stats.num_nodes == ref.nodes;
  c.edges = c.edges_compared == ref.edges;
  c.homophily = std::abs(stats.edge_homophily - ref.homophily) <= 0.005;
  c.radius = std::abs(stats.spectral_radius - ref.radius) <= 0.01;
  c.features = stats.num_features == ref.features;
  c.classes = stats.num_classes == ref.classes;
  return c;
}

}  // namespace gesn::bench
