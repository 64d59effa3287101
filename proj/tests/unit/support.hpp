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

#ifndef GESN_TESTS_SUPPORT_HPP_
#define GESN_TESTS_SUPPORT_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "gesn/graph.hpp"

namespace gesn::testing {

inline std::filesystem::path fixture_dir() { return GESN_FIXTURE_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("gesn_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::vector<Arc> arcs_from(
    std::initializer_list<std::pair<int, int>> pairs) {
  std::vector<Arc> out;
  for (auto [s, d] : pairs) out.push_back(Arc{s, d});
  return out;
}

inline SparseGraph undirected_graph(int n, std::initializer_list<std::pair<int, int>> edges,
                                    std::vector<int> labels = {}, int classes = 2,
                                    int features = 1) {
  const auto arcs = arcs_from(edges);
  return SparseGraph(n, arcs, false, Eigen::MatrixXd::Ones(n, features),
                     std::move(labels), classes);
}

inline SparseGraph path_graph(int n, int features = 1) {
  std::vector<Arc> arcs;
  for (int v = 0; v + 1 < n; ++v) arcs.push_back(Arc{v, v + 1});
  return SparseGraph(n, arcs, false, Eigen::MatrixXd::Ones(n, features), {}, 2);
}

// Erdos-Renyi style graph with edge probability p and random features and
// labels.
inline SparseGraph random_graph(std::mt19937_64& rng, int n, double p,
                                bool directed, int features = 3,
                                int classes = 3) {
  std::bernoulli_distribution edge(p);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> cls(0, classes - 1);
  std::vector<Arc> arcs;
  for (int u = 0; u < n; ++u) {
    for (int v = directed ? 0 : u + 1; v < n; ++v) {
      if (u != v && edge(rng)) arcs.push_back(Arc{u, v});
    }
  }
  Eigen::MatrixXd x(n, features);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < features; ++j) x(i, j) = unit(rng);
  }
  std::vector<int> labels(n);
  for (int& l : labels) l = cls(rng);
  return SparseGraph(n, arcs, directed, std::move(x), std::move(labels), classes);
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols,
                                     double scale = 1.0) {
  std::uniform_real_distribution<double> unit(-scale, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = unit(rng);
  }
  return m;
}

}  // namespace gesn::testing

#endif  // GESN_TESTS_SUPPORT_HPP_
