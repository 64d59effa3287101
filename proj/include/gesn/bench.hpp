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

#ifndef GESN_BENCH_HPP_
#define GESN_BENCH_HPP_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gesn/dataset.hpp"
#include "gesn/readout.hpp"
#include "gesn/reservoir.hpp"

namespace gesn::bench {

// Hyperparameter lists. Radii are multiples of 1/alpha, resolved against the
// preprocessed graph.
struct Grid {
  std::vector<double> radius_multiple;
  std::vector<double> input_scaling;
  std::vector<int> units;
  std::vector<double> lambda;

  static Grid defaults();
  std::size_t size() const {
    return radius_multiple.size() * input_scaling.size() * units.size() *
           lambda.size();
  }
};

struct SplitSource {
  std::optional<std::filesystem::path> file;  // overrides generated splits
  data::SplitFractions fractions;
  std::uint64_t seed = 0;
  bool stratified = true;
  // Generated splits use seed + run seed, giving one split per run seed.
  bool vary_with_seed = true;
};

struct BootstrapSpec {
  std::size_t resamples = 1000;
  double confidence = 0.95;
};

struct ExperimentSpec {
  std::string dataset;
  std::filesystem::path data_dir;
  bool undirected = false;
  bool lcc = false;
  Grid grid = Grid::defaults();
  int iterations = 100;  // K
  double convergence_tol = 0.0;
  NeighborMode neighbors = NeighborMode::kIn;
  std::vector<std::uint64_t> seeds{0};
  SplitSource split;
  BootstrapSpec bootstrap;

  // Throws Error naming the offending field.
  void validate() const;
};

struct GridPoint {
  double radius_multiple = 1.0;
  double input_scaling = 1.0;
  int units = 16;
  double lambda = 1.0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

// Selection order among equal validation scores: smaller H, then radius
// multiple, then scaling, then lambda.
bool tie_break_less(const GridPoint& a, const GridPoint& b);

struct PhaseTimes {
  double embed = 0.0;  // reservoir init + state iteration, seconds
  double fit = 0.0;
  double eval = 0.0;
  double total = 0.0;
};

struct RunResult {
  GridPoint point;
  std::uint64_t seed = 0;
  std::string dataset;
  double alpha = 0.0;
  double target_radius = 0.0;
  bool ok = true;
  std::string error;  // "<stage>: <message>" when !ok
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  BootstrapResult test;
  PhaseTimes times;
};

// Loaded and preprocessed graph with its spectral radius.
struct PreparedData {
  SparseGraph graph;
  std::string checksum;
  double alpha = 0.0;
};

PreparedData prepare(const ExperimentSpec& spec);
// Applies the spec's preprocessing flags to an in-memory graph.
PreparedData prepare(const ExperimentSpec& spec, const SparseGraph& raw);

// Target reservoir radius multiple/alpha. An edgeless graph (alpha = 0) takes
// the multiple as an absolute radius.
double resolve_radius(double radius_multiple, double alpha);
data::SplitSet splits_for_seed(const ExperimentSpec& spec,
                               const SparseGraph& g, std::uint64_t seed);

// Evaluates every lambda of the spec's grid for one embedding configuration
// (the reservoir states are computed once and shared).
std::vector<RunResult> evaluate_embedding(const ExperimentSpec& spec,
                                          const PreparedData& data,
                                          const data::SplitSet& splits,
                                          double radius_multiple,
                                          double input_scaling, int units,
                                          std::uint64_t seed);

// Spec whose grid holds exactly one point; runs it for `seed`. Any stage
// failure is thrown as Error("<stage>: <message>").
RunResult run_single(const ExperimentSpec& spec, std::uint64_t seed);
RunResult run_single(const ExperimentSpec& spec, const PreparedData& data,
                     std::uint64_t seed);

struct GridSummaryRow {
  GridPoint point;
  double mean_val_accuracy = 0.0;
  double mean_test_accuracy = 0.0;  // mean over seeds of bootstrap means
  double mean_ci_low = 0.0;
  double mean_ci_high = 0.0;
  std::size_t num_seeds = 0;
  bool failed = false;
};

struct GridOutcome {
  std::vector<RunResult> runs;
  std::vector<GridSummaryRow> summary;
  GridPoint best;
  std::vector<RunResult> best_runs;  // one per seed
  double best_test_mean = 0.0;       // across seeds
  double best_test_std = 0.0;
  double best_ci_low = 0.0;
  double best_ci_high = 0.0;
};

// Mean validation accuracy per grid point over the runs in `runs`.
std::vector<GridSummaryRow> summarize(const std::vector<RunResult>& runs);

// Argmax of mean validation accuracy over non-failed rows with the
// tie_break_less order. Throws if every row failed.
GridPoint select_best(const std::vector<GridSummaryRow>& rows);

// Runs every grid point for every seed. `on_result` (optional) sees each
// RunResult as it is produced.
GridOutcome grid_search(
    const ExperimentSpec& spec,
    const std::function<void(const RunResult&)>& on_result = {});
GridOutcome grid_search(
    const ExperimentSpec& spec, const PreparedData& data,
    const std::function<void(const RunResult&)>& on_result = {});

// CSV "radius_multiple,input_scaling,mean_test_accuracy,ci_low,ci_high",
// rows sorted by (radius, scaling), values averaged over seeds. The results
// must cover the full radius x scaling sub-grid at one (H, lambda); when
// several are present the caller picks them.
std::string heatmap_csv(const std::vector<RunResult>& runs,
                        std::optional<int> units = std::nullopt,
                        std::optional<double> lambda = std::nullopt);

enum class MatrixFormat { kBinary, kText };

// Binary: 64-byte ASCII header "H N iteration" padded with spaces and ending
// in '\n', then H*N little-endian float64 values in row-major order (row i
// is unit i across all nodes). Text: the header line unpadded, then H lines
// of N values with 17 significant digits.
void write_matrix_dump(const std::filesystem::path& path,
                       const EmbeddingMatrix& m, MatrixFormat format);
EmbeddingMatrix read_matrix_dump(const std::filesystem::path& path,
                                 MatrixFormat format);

// One dump per checkpoint, named embeddings_k<k>.(bin|txt). Returns the paths.
std::vector<std::filesystem::path> export_embeddings(
    const ExperimentSpec& spec, std::uint64_t seed,
    const std::vector<int>& checkpoints, const std::filesystem::path& out_dir,
    MatrixFormat format = MatrixFormat::kBinary);

nlohmann::json to_json(const RunResult& r);
RunResult run_result_from_json(const nlohmann::json& j);
ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentSpec& spec);
std::vector<RunResult> read_results_jsonl(const std::filesystem::path& path);

// Published statistics and GESN accuracies for the nine benchmark graphs.
enum class EdgeConvention { kUnorderedPairs, kArcs };

struct DatasetReference {
  std::string name;
  double homophily;
  int nodes;
  std::size_t edges;
  EdgeConvention edge_convention;
  double radius;
  int features;
  int classes;
  double whole_graph_accuracy;           // percent
  std::optional<double> lcc_accuracy;    // percent
};

const std::vector<DatasetReference>& reference_datasets();
const DatasetReference* find_reference(const std::string& name);

// Field-by-field agreement of computed statistics with a reference row:
// counts exact (edges under the row's convention), homophily within 0.005,
// spectral radius within 0.01.
struct StatsComparison {
  bool nodes = false;
  bool edges = false;
  bool homophily = false;
  bool radius = false;
  bool features = false;
  bool classes = false;
  std::size_t edges_compared = 0;  // the count matching the row's convention

  bool all() const {
    return nodes && edges && homophily && radius && features && classes;
  }
};

StatsComparison compare_stats(const GraphStats& stats,
                              const DatasetReference& ref);

}  // namespace gesn::bench

#endif  // GESN_BENCH_HPP_
