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
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "gesn/dataset.hpp"
#include "gesn/error.hpp"

namespace gesn::data {
namespace {

constexpr double kRoundingSlack = 1e-9;

// Largest-remainder apportionment of `count` items over three fractions.
std::array<int, 3> apportion(int count, const std::array<double, 3>& f) {
  std::array<int, 3> sizes{};
  std::array<double, 3> remainder{};
  double total_exact = 0.0;
  int assigned = 0;
  for (int s = 0; s < 3; ++s) {
    const double exact = f[s] * count;
    total_exact += exact;
    sizes[s] = static_cast<int>(std::floor(exact + kRoundingSlack));
    remainder[s] = exact - sizes[s];
    assigned += sizes[s];
  }
  int left = static_cast<int>(std::floor(total_exact + kRoundingSlack)) - assigned;
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (int i = 0; left > 0 && i < 3; ++i, --left) ++sizes[order[i]];
  return sizes;
}

void assign(const std::vector<int>& shuffled, const std::array<int, 3>& sizes,
            SplitSet& out) {
  auto it = shuffled.begin();
  out.train.insert(out.train.end(), it, it + sizes[0]);
  it += sizes[0];
  out.val.insert(out.val.end(), it, it + sizes[1]);
  it += sizes[1];
  out.test.insert(out.test.end(), it, it + sizes[2]);
}

}  // namespace

SplitSet make_splits(const SparseGraph& g, const SplitFractions& fractions,
                     std::uint64_t seed, bool stratified) {
  const std::array<double, 3> f{fractions.train, fractions.val, fractions.test};
  double sum = 0.0;
  int positive = 0;
  for (double x : f) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error("make_splits: fractions must be non-negative");
    }
    sum += x;
    positive += x > 0.0 ? 1 : 0;
  }
  if (positive == 0) throw Error("make_splits: all fractions are zero");
  if (sum > 1.0 + kRoundingSlack) throw Error("make_splits: fractions sum above 1");

  SplitSet out;
  out.seed = seed;
  out.fractions = fractions;
  out.stratified = stratified;
  std::mt19937_64 rng(seed);

  if (!stratified) {
    std::vector<int> nodes(g.num_nodes());
    for (int v = 0; v < g.num_nodes(); ++v) nodes[v] = v;
    std::shuffle(nodes.begin(), nodes.end(), rng);
    assign(nodes, apportion(g.num_nodes(), f), out);
  } else {
    if (!g.has_labels()) throw Error("make_splits: stratified split needs labels");
    std::vector<std::vector<int>> by_class(g.num_classes());
    for (int v = 0; v < g.num_nodes(); ++v) by_class[g.labels()[v]].push_back(v);
    for (int c = 0; c < g.num_classes(); ++c) {
      auto& members = by_class[c];
      if (members.empty()) continue;
      if (static_cast<int>(members.size()) < positive) {
        throw Error("make_splits: class " + std::to_string(c) + " has " +
                    std::to_string(members.size()) +
                    " node(s), fewer than the " + std::to_string(positive) +
                    " splits that each need one");
      }
      std::shuffle(members.begin(), members.end(), rng);
      auto sizes = apportion(static_cast<int>(members.size()), f);
      for (int s = 0; s < 3; ++s) {
        if (f[s] > 0.0 && sizes[s] == 0) {
          const auto donor = std::max_element(sizes.begin(), sizes.end());
          --*donor;
          ++sizes[s];
        }
      }
      assign(members, sizes, out);
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

void validate_splits(const SplitSet& splits, int num_nodes) {
  std::vector<char> owner(num_nodes, 0);
  auto mark = [&](const std::vector<int>& idx, char tag, const char* name) {
    for (int v : idx) {
      if (v < 0 || v >= num_nodes) {
        throw Error(std::string("split ") + name + ": index " +
                    std::to_string(v) + " outside [0, " +
                    std::to_string(num_nodes) + ")");
      }
      if (owner[v] != 0) {
        throw Error(std::string("split ") + name + ": index " +
                    std::to_string(v) + " already used");
      }
      owner[v] = tag;
    }
  };
  mark(splits.train, 1, "train");
  mark(splits.val, 2, "val");
  mark(splits.test, 3, "test");
}

SplitSet load_splits(const std::filesystem::path& path, int num_nodes) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open split file " + path.string());
  SplitSet out;
  std::vector<int>* section = nullptr;
  std::string line;
  std::size_t line_no = 0;
  bool seen[3] = {false, false, false};
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      if (line == "#train") {
        section = &out.train;
        seen[0] = true;
      } else if (line == "#val") {
        section = &out.val;
        seen[1] = true;
      } else if (line == "#test") {
        section = &out.test;
        seen[2] = true;
      } else {
        throw ParseError(path.string(), line_no, "unknown section '" + line + "'");
      }
      continue;
    }
    if (section == nullptr) {
      throw ParseError(path.string(), line_no, "index before any section header");
    }
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(line, &used);
    } catch (const std::exception&) {
      throw ParseError(path.string(), line_no, "invalid index '" + line + "'");
    }
    if (line.find_first_not_of(" \t", used) != std::string::npos) {
      throw ParseError(path.string(), line_no, "invalid index '" + line + "'");
    }
    section->push_back(v);
  }
  if (!seen[0] || !seen[1] || !seen[2]) {
    throw ParseError(path.string(), line_no,
                     "split file needs #train, #val and #test sections");
  }
  validate_splits(out, num_nodes);
  const double n = num_nodes > 0 ? num_nodes : 1;
  out.fractions = {out.train.size() / n, out.val.size() / n, out.test.size() / n};
  return out;
}

void save_splits(const std::filesystem::path& path, const SplitSet& splits) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write split file " + path.string());
  out << "#train\n";
  for (int v : splits.train) out << v << '\n';
  out << "#val\n";
  for (int v : splits.val) out << v << '\n';
  out << "#test\n";
  for (int v : splits.test) out << v << '\n';
}

}  // namespace gesn::data
