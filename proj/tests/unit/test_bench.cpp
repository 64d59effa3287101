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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <cstring>
#include <random>
#include <sstream>

#include "gesn/bench.hpp"
#include "gesn/error.hpp"
#include "support.hpp"

namespace gesn::bench {
namespace {

using testing::TempDir;

ExperimentSpec fixture_spec() {
  ExperimentSpec spec;
  spec.dataset = "tri";
  spec.data_dir = testing::fixture_dir();
  spec.grid = Grid{{2.0}, {1.0}, {4}, {1.0}};
  spec.split.file = testing::fixture_dir() / "tri.split";
  spec.bootstrap.resamples = 200;
  return spec;
}

// Labels are the sign of feature 0; no edges, so radius has no effect.
SparseGraph sign_task(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd x = testing::random_matrix(rng, n, 2);
  std::vector<int> labels(n);
  for (int v = 0; v < n; ++v) {
    if (std::abs(x(v, 0)) < 0.05) x(v, 0) = v % 2 ? 0.5 : -0.5;
    labels[v] = x(v, 0) > 0 ? 1 : 0;
  }
  return SparseGraph(n, {}, false, x, labels, 2);
}

ExperimentSpec sign_spec() {
  ExperimentSpec spec;
  spec.dataset = "sign";
  spec.grid = Grid{{4.0, 0.5, 1.0, 2.0}, {1.0}, {8}, {1e-3}};
  spec.seeds = {0, 1, 2};
  spec.bootstrap.resamples = 100;
  return spec;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

RunResult fake_run(double radius, double scaling, int units, double lambda, double acc,
                   std::uint64_t seed = 0) {
  RunResult r;
  r.point = {radius, scaling, units, lambda};
  r.seed = seed;
  r.val_accuracy = acc;
  r.test.mean_accuracy = acc;
  r.test.ci_low = acc - 0.1;
  r.test.ci_high = acc + 0.1;
  return r;
}

TEST(ExperimentSpec, ValidationRejectsDegenerateGrids) {
  ExperimentSpec spec = fixture_spec();
  EXPECT_NO_THROW(spec.validate());
  spec.grid.units = {16, 0};
  EXPECT_THROW(spec.validate(), Error);
  spec = fixture_spec();
  spec.grid.radius_multiple = {};
  EXPECT_THROW(spec.validate(), Error);
  spec = fixture_spec();
  spec.grid.radius_multiple = {-1.0};
  EXPECT_THROW(spec.validate(), Error);
  spec = fixture_spec();
  spec.seeds = {};
  EXPECT_THROW(spec.validate(), Error);
  spec = fixture_spec();
  spec.bootstrap.confidence = 1.0;
  EXPECT_THROW(spec.validate(), Error);
}

TEST(ExperimentSpec, DefaultGridCoversPublishedRanges) {
  const Grid g = Grid::defaults();
  EXPECT_EQ(g.radius_multiple.front(), 0.1);
  EXPECT_EQ(g.radius_multiple.back(), 35.0);
  EXPECT_EQ(g.input_scaling.front(), 1.0 / 320);
  EXPECT_EQ(g.input_scaling.back(), 1.0);
  EXPECT_EQ(g.units.front(), 16);
  EXPECT_EQ(g.units.back(), 4096);
  EXPECT_EQ(g.size(), 12u * 6 * 5 * 4);
}

TEST(RunSingle, FixtureCompletesWithUnitRangeAccuracies) {
  for (std::uint64_t seed : {0u, 1u, 7u}) {
    const RunResult r = run_single(fixture_spec(), seed);
    EXPECT_TRUE(r.ok);
    EXPECT_GE(r.val_accuracy, 0.0);
    EXPECT_LE(r.val_accuracy, 1.0);
    EXPECT_GE(r.test.mean_accuracy, 0.0);
    EXPECT_LE(r.test.mean_accuracy, 1.0);
    EXPECT_NEAR(r.alpha, std::sqrt(2.0), 1e-8);
    EXPECT_NEAR(r.target_radius, 2.0 / std::sqrt(2.0), 1e-8);
  }
}

TEST(RunSingle, IdenticalSpecGivesIdenticalResult) {
  const RunResult a = run_single(fixture_spec(), 3);
  const RunResult b = run_single(fixture_spec(), 3);
  EXPECT_EQ(a.val_accuracy, b.val_accuracy);
  EXPECT_EQ(a.test_accuracy, b.test_accuracy);
  EXPECT_EQ(a.test.mean_accuracy, b.test.mean_accuracy);
  EXPECT_EQ(a.test.ci_low, b.test.ci_low);
  EXPECT_EQ(a.test.ci_high, b.test.ci_high);
}

TEST(RunSingle, StageNamedErrors) {
  ExperimentSpec spec = fixture_spec();
  spec.dataset = "absent";
  try {
    run_single(spec, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("load: ", 0), 0u) << e.what();
  }
  spec = fixture_spec();
  spec.split.file.reset();
  try {
    run_single(spec, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("split: ", 0), 0u) << e.what();
  }
  spec = fixture_spec();
  spec.grid.lambda = {1.0, 2.0};
  EXPECT_THROW(run_single(spec, 0), Error);
}

TEST(RunSingle, PhaseTimesAccountForTotal) {
  const PreparedData data = prepare(sign_spec(), sign_task(200, 1));
  ExperimentSpec spec = sign_spec();
  spec.grid = Grid{{1.0}, {1.0}, {64}, {1.0}};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RunResult r = run_single(spec, data, seed);
    const double parts = r.times.embed + r.times.fit + r.times.eval;
    EXPECT_GT(r.times.total, 0.0);
    EXPECT_LE(std::abs(parts - r.times.total), 0.1 * r.times.total);
  }
}

TEST(GridSearch, SinglePointEqualsRunSingle) {
  ExperimentSpec spec = fixture_spec();
  spec.seeds = {4};
  const GridOutcome out = grid_search(spec);
  ASSERT_EQ(out.runs.size(), 1u);
  const RunResult single = run_single(spec, 4);
  EXPECT_EQ(out.best, single.point);
  EXPECT_EQ(out.runs[0].val_accuracy, single.val_accuracy);
  EXPECT_EQ(out.runs[0].test.mean_accuracy, single.test.mean_accuracy);
  EXPECT_EQ(out.best_test_mean, single.test.mean_accuracy);
}

TEST(GridSearch, RadiusIndependentTaskSelectsSmallestRadius) {
  const ExperimentSpec spec = sign_spec();
  const PreparedData data = prepare(spec, sign_task(60, 2));
  EXPECT_EQ(data.alpha, 0.0);
  const GridOutcome out = grid_search(spec, data);
  ASSERT_EQ(out.summary.size(), 4u);
  for (const auto& row : out.summary) {
    EXPECT_EQ(row.mean_val_accuracy, out.summary.front().mean_val_accuracy);
  }
  EXPECT_EQ(out.best.radius_multiple, 0.5);
  EXPECT_EQ(out.best_runs.size(), 3u);
  EXPECT_GT(out.best_test_mean, 0.8);
}

TEST(GridSearch, FailedPointsAreExcludedFromSelection) {
  ExperimentSpec spec = sign_spec();
  // lambda = 0 with fewer training nodes than H + 1 is singular
  spec.grid = Grid{{1.0}, {1.0}, {64}, {0.0, 10.0}};
  spec.seeds = {0};
  const PreparedData data = prepare(spec, sign_task(40, 3));
  std::vector<RunResult> seen;
  const GridOutcome out = grid_search(spec, data, [&](const RunResult& r) { seen.push_back(r); });
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_FALSE(seen[0].ok);
  EXPECT_EQ(seen[0].error.rfind("fit: ", 0), 0u) << seen[0].error;
  EXPECT_TRUE(seen[1].ok);
  EXPECT_EQ(out.best.lambda, 10.0);
}

TEST(GridSearch, DeterministicAcrossRepeats) {
  ExperimentSpec spec = sign_spec();
  spec.grid = Grid{{0.5, 2.0}, {0.1, 1.0}, {4, 8}, {1e-3, 1.0}};
  spec.seeds = {0, 1};
  std::mt19937_64 rng(5);
  const PreparedData data = prepare(spec, testing::random_graph(rng, 40, 0.1, false, 3, 2));
  const GridOutcome a = grid_search(spec, data);
  const GridOutcome b = grid_search(spec, data);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].val_accuracy, b.runs[i].val_accuracy);
    EXPECT_EQ(a.runs[i].test.mean_accuracy, b.runs[i].test.mean_accuracy);
  }
  EXPECT_EQ(a.best, b.best);
}

TEST(SelectBestProperty, PermutationInvariant) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> acc(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GridSummaryRow> rows;
    for (double r : {0.5, 1.0, 2.0}) {
      for (double s : {0.1, 1.0}) {
        for (int h : {4, 16}) {
          for (double l : {1e-3, 1.0}) {
            GridSummaryRow row;
            row.point = {r, s, h, l};
            row.mean_val_accuracy = acc(rng) / 4.0;  // many exact ties
            row.failed = acc(rng) == 0 && acc(rng) == 0;
            rows.push_back(row);
          }
        }
      }
    }
    rows.front().failed = false;
    const GridPoint best = select_best(rows);
    for (int p = 0; p < 5; ++p) {
      std::shuffle(rows.begin(), rows.end(), rng);
      EXPECT_EQ(select_best(rows), best);
    }
  }
}

TEST(SelectBest, TieBreakOrderAndAllFailed) {
  std::vector<GridSummaryRow> rows(4);
  rows[0].point = {1.0, 1.0, 16, 1.0};
  rows[1].point = {2.0, 0.5, 4, 1.0};
  rows[2].point = {1.0, 0.5, 4, 1.0};
  rows[3].point = {1.0, 0.5, 4, 0.1};
  for (auto& r : rows) r.mean_val_accuracy = 0.5;
  EXPECT_EQ(select_best(rows), (GridPoint{1.0, 0.5, 4, 0.1}));
  rows[0].mean_val_accuracy = 0.6;
  EXPECT_EQ(select_best(rows), rows[0].point);
  for (auto& r : rows) r.failed = true;
  EXPECT_THROW(select_best(rows), Error);
}

TEST(Summarize, AveragesOverSeedsAndFlagsFailures) {
  std::vector<RunResult> runs{fake_run(1, 1, 4, 1, 0.5, 0), fake_run(1, 1, 4, 1, 0.7, 1),
                              fake_run(2, 1, 4, 1, 0.9, 0), fake_run(2, 1, 4, 1, 0.9, 1)};
  runs[3].ok = false;
  const auto rows = summarize(runs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].mean_val_accuracy, 0.6, 1e-15);
  EXPECT_NEAR(rows[0].mean_ci_low, 0.5, 1e-15);
  EXPECT_EQ(rows[0].num_seeds, 2u);
  EXPECT_FALSE(rows[0].failed);
  EXPECT_TRUE(rows[1].failed);
  EXPECT_EQ(select_best(rows), rows[0].point);
}

TEST(Heatmap, SingleCellGivesOneRow) {
  const std::string csv = heatmap_csv({fake_run(1, 0.5, 4, 1, 0.75)});
  EXPECT_EQ(csv,
            "radius_multiple,input_scaling,mean_test_accuracy,ci_low,ci_high\n"
            "1,0.5,0.75,0.65000000000000002,0.84999999999999998\n");
}

TEST(Heatmap, TwoByTwoRowsSortedByRadiusThenScaling) {
  const std::vector<RunResult> runs{fake_run(2, 1, 4, 1, 0.1), fake_run(1, 1, 4, 1, 0.2),
                                    fake_run(2, 0.5, 4, 1, 0.3), fake_run(1, 0.5, 4, 1, 0.4),
                                    fake_run(1, 0.5, 4, 1, 0.6, 1)};
  const std::string csv = heatmap_csv(runs);
  std::vector<std::string> lines;
  std::stringstream ss(csv);
  for (std::string l; std::getline(ss, l);) lines.push_back(l.substr(0, l.find(',', l.find(',') + 1)));
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[1], "1,0.5");
  EXPECT_EQ(lines[2], "1,1");
  EXPECT_EQ(lines[3], "2,0.5");
  EXPECT_EQ(lines[4], "2,1");
  EXPECT_NE(csv.find("1,0.5,0.5,"), std::string::npos);  // mean over the two seeds
}

TEST(Heatmap, MissingCellIsListed) {
  const std::vector<RunResult> runs{fake_run(1, 1, 4, 1, 0.1), fake_run(2, 0.5, 4, 1, 0.3),
                                    fake_run(1, 0.5, 4, 1, 0.4)};
  try {
    heatmap_csv(runs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("radius_multiple=2, input_scaling=1"),
              std::string::npos)
        << e.what();
  }
}

TEST(Heatmap, SeveralUnitsRequireAChoice) {
  const std::vector<RunResult> runs{fake_run(1, 1, 4, 1, 0.1), fake_run(1, 1, 8, 1, 0.3)};
  EXPECT_THROW(heatmap_csv(runs), Error);
  EXPECT_NO_THROW(heatmap_csv(runs, 8));
}

TEST(ResultsJson, RunResultRoundTrip) {
  RunResult r = fake_run(6, 0.05, 4096, 1e-3, 0.8125, 9);
  r.dataset = "texas";
  r.alpha = 2.56;
  r.target_radius = 6 / 2.56;
  r.test.num_resamples = 1000;
  r.test.confidence = 0.95;
  r.times = {1.5, 0.25, 0.125, 1.875};
  const RunResult back = run_result_from_json(nlohmann::json::parse(to_json(r).dump()));
  EXPECT_EQ(back.point, r.point);
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.dataset, r.dataset);
  EXPECT_EQ(back.target_radius, r.target_radius);
  EXPECT_EQ(back.test.ci_high, r.test.ci_high);
  EXPECT_EQ(back.times.total, r.times.total);
  EXPECT_TRUE(back.ok);
  r.ok = false;
  r.error = "fit: singular";
  const RunResult failed = run_result_from_json(to_json(r));
  EXPECT_FALSE(failed.ok);
  EXPECT_EQ(failed.error, "fit: singular");
}

TEST(ResultsJson, SpecRoundTripAndDefaults) {
  ExperimentSpec spec = fixture_spec();
  spec.neighbors = NeighborMode::kBoth;
  spec.seeds = {1, 2, 3};
  const ExperimentSpec back = spec_from_json(to_json(spec));
  EXPECT_EQ(back.dataset, spec.dataset);
  EXPECT_EQ(back.grid.units, spec.grid.units);
  EXPECT_EQ(back.seeds, spec.seeds);
  EXPECT_EQ(back.neighbors, NeighborMode::kBoth);
  EXPECT_EQ(*back.split.file, *spec.split.file);

  const ExperimentSpec minimal = spec_from_json(nlohmann::json{{"dataset", "cora"}});
  EXPECT_EQ(minimal.grid.units, Grid::defaults().units);
  EXPECT_EQ(minimal.iterations, 100);
  EXPECT_EQ(minimal.bootstrap.resamples, 1000u);
  EXPECT_THROW(spec_from_json(nlohmann::json{{"grid", {}}}), Error);
  EXPECT_THROW(spec_from_json(nlohmann::json{{"dataset", "x"}, {"neighbors", "up"}}), Error);
}

TEST(ResultsJson, JsonlReaderReportsBadLine) {
  TempDir dir("jsonl");
  const auto path = dir.path() / "r.jsonl";
  std::ofstream(path) << to_json(fake_run(1, 1, 4, 1, 0.5)).dump() << "\n\n{oops\n";
  try {
    read_results_jsonl(path);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(MatrixDump, BinaryLayoutAndRoundTrip) {
  TempDir dir("dump");
  std::mt19937_64 rng(2);
  EmbeddingMatrix m;
  m.states = testing::random_matrix(rng, 3, 5);
  m.iterations_run = 10;
  const auto path = dir.path() / "m.bin";
  write_matrix_dump(path, m, MatrixFormat::kBinary);
  const std::string bytes = slurp(path);
  ASSERT_EQ(bytes.size(), 64u + 3 * 5 * 8);
  EXPECT_EQ(bytes.substr(0, 7), "3 5 10 ");
  EXPECT_EQ(bytes[63], '\n');
  double first_row_second;
  std::memcpy(&first_row_second, bytes.data() + 64 + 8, 8);
  EXPECT_EQ(first_row_second, m.states(0, 1));
  const EmbeddingMatrix back = read_matrix_dump(path, MatrixFormat::kBinary);
  EXPECT_EQ(back.states, m.states);
  EXPECT_EQ(back.iterations_run, 10);
}

TEST(MatrixDump, TextRoundTripIsExact) {
  TempDir dir("dump_text");
  std::mt19937_64 rng(3);
  EmbeddingMatrix m;
  m.states = testing::random_matrix(rng, 4, 2);
  m.iterations_run = 7;
  const auto path = dir.path() / "m.txt";
  write_matrix_dump(path, m, MatrixFormat::kText);
  EXPECT_EQ(slurp(path).substr(0, 6), "4 2 7\n");
  EXPECT_EQ(read_matrix_dump(path, MatrixFormat::kText).states, m.states);
}

ExperimentSpec dump_spec(const std::filesystem::path& dir, const std::string& name) {
  ExperimentSpec spec;
  spec.dataset = name;
  spec.data_dir = dir;
  spec.grid = Grid{{6.0}, {1.0}, {8}, {1.0}};
  return spec;
}

TEST(ExportEmbeddings, CheckpointZeroWritesZeroMatrix) {
  TempDir out("emb0");
  const auto paths = export_embeddings(dump_spec(testing::fixture_dir(), "tri"), 0, {0},
                                       out.path());
  ASSERT_EQ(paths.size(), 1u);
  const EmbeddingMatrix m = read_matrix_dump(paths[0], MatrixFormat::kBinary);
  EXPECT_EQ(m.states.rows(), 8);
  EXPECT_EQ(m.states.cols(), 3);
  EXPECT_TRUE(m.states.isZero(0.0));
  EXPECT_EQ(m.iterations_run, 0);
}

TEST(ExportEmbeddings, ThreeCheckpointsGiveEqualSizedFiles) {
  TempDir out("emb3");
  const auto paths = export_embeddings(dump_spec(testing::fixture_dir(), "tri"), 0,
                                       {1, 10, 100}, out.path());
  ASSERT_EQ(paths.size(), 3u);
  const auto size = std::filesystem::file_size(paths[0]);
  for (const auto& p : paths) EXPECT_EQ(std::filesystem::file_size(p), size);
  EXPECT_NE(slurp(paths[0]), slurp(paths[2]));
}

TEST(ExportEmbeddings, EdgelessFixtureIsStationaryAfterFirstIteration) {
  TempDir data("edgeless"), out("edgeless_out");
  data::save_dataset(data.path(), "iso", sign_task(6, 4));
  const auto paths = export_embeddings(dump_spec(data.path(), "iso"), 0, {1, 10, 100},
                                       out.path());
  // identical matrices; headers differ only in the iteration field
  EXPECT_EQ(slurp(paths[0]).substr(64), slurp(paths[1]).substr(64));
  EXPECT_EQ(slurp(paths[0]).substr(64), slurp(paths[2]).substr(64));
}

TEST(ReferenceTables, NineDatasetsWithPublishedValues) {
  const auto& refs = reference_datasets();
  ASSERT_EQ(refs.size(), 9u);
  const DatasetReference* texas = find_reference("Texas");
  ASSERT_NE(texas, nullptr);
  EXPECT_EQ(texas->nodes, 183);
  EXPECT_EQ(texas->edges, 295u);
  EXPECT_EQ(texas->radius, 2.56);
  EXPECT_EQ(texas->whole_graph_accuracy, 84.3);
  EXPECT_EQ(*texas->lcc_accuracy, 73.96);
  const DatasetReference* cora = find_reference("cora");
  ASSERT_NE(cora, nullptr);
  EXPECT_EQ(cora->edges, 10556u);
  EXPECT_EQ(cora->edge_convention, EdgeConvention::kArcs);
  EXPECT_EQ(find_reference("nonexistent"), nullptr);
}

TEST(ReferenceTables, CompareStatsUsesRowConvention) {
  GraphStats s;
  s.num_nodes = 2708;
  s.num_edges = 5278;
  s.num_arcs = 10556;
  s.edge_homophily = 0.81;
  s.spectral_radius = 14.395;
  s.num_features = 1433;
  s.num_classes = 7;
  const StatsComparison c = compare_stats(s, *find_reference("cora"));
  EXPECT_TRUE(c.all());
  EXPECT_EQ(c.edges_compared, 10556u);
  s.spectral_radius = 14.42;
  EXPECT_FALSE(compare_stats(s, *find_reference("cora")).radius);
}

}  // namespace
}  // namespace gesn::bench
