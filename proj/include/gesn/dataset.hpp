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

#ifndef GESN_DATASET_HPP_
#define GESN_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gesn/graph.hpp"

// Canonical on-disk datasets:
//   <name>.meta   lines nodes=N, features=X, classes=C, directed=0|1
//   <name>.edges  one "src<TAB>dst" per line, 0-based
//   <name>.x      N lines of X space-separated reals
//   <name>.y      N lines with a class id
//   <name>.ids    optional, N lines with the original node identifier
// Split files hold three sections introduced by "#train", "#val" and "#test",
// one node index per line.
namespace gesn::data {

struct CanonicalDataset {
  SparseGraph graph;
  std::string name;
  std::string source_checksum;  // SHA-256 hex of meta|edges|x|y[|ids]
};

CanonicalDataset load_dataset(const std::filesystem::path& dir,
                              const std::string& name);

// Writes the five files (ids only when they differ from 0..N-1). Features
// are written with 17 significant digits.
void save_dataset(const std::filesystem::path& dir, const std::string& name,
                  const SparseGraph& g);

// SHA-256 of the concatenated canonical files, as lowercase hex.
std::string dataset_checksum(const std::filesystem::path& dir,
                             const std::string& name);

bool dataset_exists(const std::filesystem::path& dir, const std::string& name);

struct SplitFractions {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct SplitSet {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
  std::uint64_t seed = 0;
  SplitFractions fractions;
  bool stratified = false;
};

// Seeded shuffle. Per-split sizes use largest-remainder rounding of
// fraction * count (globally, or per class when stratified). A stratified
// split gives every class at least one node in each split with a positive
// fraction, and fails if a class is too small for that.
SplitSet make_splits(const SparseGraph& g, const SplitFractions& fractions,
                     std::uint64_t seed, bool stratified);

// Throws on overlap or indices outside [0, num_nodes).
void validate_splits(const SplitSet& splits, int num_nodes);

SplitSet load_splits(const std::filesystem::path& path, int num_nodes);
void save_splits(const std::filesystem::path& path, const SplitSet& splits);

}  // namespace gesn::data

#endif  // GESN_DATASET_HPP_
