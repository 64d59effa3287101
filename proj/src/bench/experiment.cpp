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
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <utility>

#include <spdlog/spdlog.h>

#include "gesn/bench.hpp"
#include "gesn/error.hpp"

namespace gesn::bench {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs `fn`, rethrowing any failure as Error("<stage>: <message>").
template <typename Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw Error(std::string(stage) + ": " + e.what());
  }
}

template <typename T>
void require_nonempty(const std::vector<T>& v, const char* field) {
  if (v.empty()) throw Error(std::string("grid.") + field + " is empty");
}

std::vector<int> gather_labels(std::span<const int> labels,
                               const std::vector<int>& idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = labels[idx[i]];
  return out;
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& states,
                               const std::vector<int>& idx) {
  return states(Eigen::all, idx);
}

}  // namespace

Grid Grid::defaults() {
  return Grid{
      {0.1, 0.5, 1, 2, 4, 6, 9, 12, 18, 24, 30, 35},
      {1.0 / 320, 1.0 / 80, 1.0 / 20, 1.0 / 5, 1.0 / 2, 1.0},
      {16, 64, 256, 1024, 4096},
      {1e-6, 1e-3, 1, 10},
  };
}

void ExperimentSpec::validate() const {
  if (dataset.empty()) throw Error("dataset name is empty");
  require_nonempty(grid.radius_multiple, "radius_multiple");
  require_nonempty(grid.input_scaling, "input_scaling");
  require_nonempty(grid.units, "units");
  require_nonempty(grid.lambda, "lambda");
  for (double r : grid.radius_multiple) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw Error("radius multiples must be positive and finite");
    }
  }
  for (double s : grid.input_scaling) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error("input scalings must be positive and finite");
    }
  }
  for (int h : grid.units) {
    if (h < 1) throw Error("units must be >= 1 (got " + std::to_string(h) + ")");
  }
  for (double l : grid.lambda) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw Error("lambda must be >= 0 and finite");
    }
  }
  if (iterations < 0) throw Error("K must be >= 0");
  if (!(convergence_tol >= 0.0)) throw Error("convergence_tol must be >= 0");
  if (seeds.empty()) throw Error("seeds is empty");
  if (!split.file) {
    const auto& f = split.fractions;
    if (f.train <= 0.0 || f.val <= 0.0 || f.test <= 0.0 ||
        f.train + f.val + f.test > 1.0 + 1e-9) {
      throw Error("split fractions must be positive and sum to at most 1");
    }
  }
  if (bootstrap.resamples < 1) throw Error("bootstrap.resamples must be >= 1");
  if (!(bootstrap.confidence > 0.0 && bootstrap.confidence < 1.0)) {
    throw Error("bootstrap.confidence must lie in (0, 1)");
  }
}

bool tie_break_less(const GridPoint& a, const GridPoint& b) {
  return std::tie(a.units, a.radius_multiple, a.input_scaling, a.lambda) <
         std::tie(b.units, b.radius_multiple, b.input_scaling, b.lambda);
}

double resolve_radius(double radius_multiple, double alpha) {
  return alpha > 0.0 ? radius_multiple / alpha : radius_multiple;
}

PreparedData prepare(const ExperimentSpec& spec, const SparseGraph& raw) {
  SparseGraph g = raw;
  g = staged("preprocess", [&] {
    SparseGraph out = spec.undirected ? to_undirected(g) : g;
    return spec.lcc ? largest_connected_component(out) : out;
  });
  const double alpha = staged("spectral_radius", [&] { return spectral_radius(g); });
  return PreparedData{std::move(g), {}, alpha};
}

PreparedData prepare(const ExperimentSpec& spec) {
  data::CanonicalDataset ds =
      staged("load", [&] { return data::load_dataset(spec.data_dir, spec.dataset); });
  PreparedData out = prepare(spec, ds.graph);
  out.checksum = ds.source_checksum;
  return out;
}

data::SplitSet splits_for_seed(const ExperimentSpec& spec,
                               const SparseGraph& g, std::uint64_t seed) {
  return staged("split", [&] {
    if (spec.split.file) return data::load_splits(*spec.split.file, g.num_nodes());
    const std::uint64_t s = spec.split.seed + (spec.split.vary_with_seed ? seed : 0);
    return data::make_splits(g, spec.split.fractions, s, spec.split.stratified);
  });
}

std::vector<RunResult> evaluate_embedding(const ExperimentSpec& spec,
                                          const PreparedData& data,
                                          const data::SplitSet& splits,
                                          double radius_multiple,
                                          double input_scaling, int units,
                                          std::uint64_t seed) {
  const SparseGraph& g = data.graph;
  ReservoirConfig cfg;
  cfg.units = units;
  cfg.input_scaling = input_scaling;
  cfg.target_radius = resolve_radius(radius_multiple, data.alpha);
  cfg.seed = seed;
  cfg.max_iterations = spec.iterations;
  cfg.convergence_tol = spec.convergence_tol;
  cfg.neighbors = spec.neighbors;

  std::vector<RunResult> results;
  results.reserve(spec.grid.lambda.size());
  for (double lambda : spec.grid.lambda) {
    RunResult r;
    r.point = GridPoint{radius_multiple, input_scaling, units, lambda};
    r.seed = seed;
    r.dataset = spec.dataset;
    r.alpha = data.alpha;
    r.target_radius = cfg.target_radius;
    results.push_back(std::move(r));
  }
  auto fail_all = [&](const std::string& msg) {
    for (auto& r : results) {
      r.ok = false;
      r.error = msg;
    }
    return results;
  };

  const auto embed_start = Clock::now();
  EmbeddingMatrix emb;
  try {
    emb = staged("embed", [&] {
      cfg.validate();
      const ReservoirWeights w = init_reservoir(cfg, g.num_features());
      return compute_embeddings(g, w, cfg);
    });
  } catch (const Error& e) {
    return fail_all(e.what());
  }
  const double embed_time = seconds_since(embed_start);

  const auto slice_start = Clock::now();
  const auto labels = g.labels();
  const Eigen::MatrixXd train_x = gather_columns(emb.states, splits.train);
  const Eigen::MatrixXd val_x = gather_columns(emb.states, splits.val);
  const Eigen::MatrixXd test_x = gather_columns(emb.states, splits.test);
  const std::vector<int> train_y = gather_labels(labels, splits.train);
  const std::vector<int> val_y = gather_labels(labels, splits.val);
  const std::vector<int> test_y = gather_labels(labels, splits.test);
  // slicing is shared by every lambda; charge it to each result's eval
  const double slice_time = seconds_since(slice_start);

  for (RunResult& r : results) {
    try {
      const auto fit_start = Clock::now();
      const ReadoutModel model = staged("fit", [&] {
        return fit_ridge(train_x, train_y, g.num_classes(), r.point.lambda);
      });
      r.times.fit = seconds_since(fit_start);

      const auto eval_start = Clock::now();
      staged("eval", [&] {
        r.val_accuracy = accuracy(predict(model, val_x), val_y);
        const std::vector<int> test_pred = predict(model, test_x);
        r.test_accuracy = accuracy(test_pred, test_y);
        r.test = bootstrap_ci(test_pred, test_y, spec.bootstrap.resamples,
                              spec.bootstrap.confidence, seed);
        return 0;
      });
      r.times.eval = seconds_since(eval_start) + slice_time;
    } catch (const Error& e) {
      r.ok = false;
      r.error = e.what();
    }
    r.times.embed = embed_time;
    r.times.total = r.times.embed + r.times.fit + r.times.eval;
  }
  return results;
}

RunResult run_single(const ExperimentSpec& spec, const PreparedData& data,
                     std::uint64_t seed) {
  staged("spec", [&] {
    spec.validate();
    if (spec.grid.size() != 1) {
      throw Error("run_single needs exactly one grid point (got " +
                  std::to_string(spec.grid.size()) + ")");
    }
    return 0;
  });
  const auto start = Clock::now();
  const data::SplitSet splits = splits_for_seed(spec, data.graph, seed);
  const double split_time = seconds_since(start);
  std::vector<RunResult> rs = evaluate_embedding(
      spec, data, splits, spec.grid.radius_multiple[0],
      spec.grid.input_scaling[0], spec.grid.units[0], seed);
  RunResult r = std::move(rs.front());
  if (!r.ok) throw Error(r.error);
  r.times.total += split_time;
  return r;
}

RunResult run_single(const ExperimentSpec& spec, std::uint64_t seed) {
  staged("spec", [&] {
    spec.validate();
    return 0;
  });
  const auto start = Clock::now();
  const PreparedData data = prepare(spec);
  const double load_time = seconds_since(start);
  RunResult r = run_single(spec, data, seed);
  // loading and preprocessing belong to the embedding phase
  r.times.embed += load_time;
  r.times.total += load_time;
  return r;
}

std::vector<GridSummaryRow> summarize(const std::vector<RunResult>& runs) {
  std::vector<GridSummaryRow> rows;
  std::vector<std::size_t> ok_counts;
  for (const RunResult& r : runs) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const GridSummaryRow& row) { return row.point == r.point; });
    if (it == rows.end()) {
      rows.push_back(GridSummaryRow{r.point});
      ok_counts.push_back(0);
      it = rows.end() - 1;
    }
    GridSummaryRow& row = *it;
    ++row.num_seeds;
    if (!r.ok) {
      row.failed = true;
      continue;
    }
    ++ok_counts[it - rows.begin()];
    row.mean_val_accuracy += r.val_accuracy;
    row.mean_test_accuracy += r.test.mean_accuracy;
    row.mean_ci_low += r.test.ci_low;
    row.mean_ci_high += r.test.ci_high;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double n = static_cast<double>(std::max<std::size_t>(ok_counts[i], 1));
    rows[i].mean_val_accuracy /= n;
    rows[i].mean_test_accuracy /= n;
    rows[i].mean_ci_low /= n;
    rows[i].mean_ci_high /= n;
  }
  return rows;
}

GridPoint select_best(const std::vector<GridSummaryRow>& rows) {
  const GridSummaryRow* best = nullptr;
  for (const GridSummaryRow& row : rows) {
    if (row.failed) continue;
    if (best == nullptr || row.mean_val_accuracy > best->mean_val_accuracy ||
        (row.mean_val_accuracy == best->mean_val_accuracy &&
         tie_break_less(row.point, best->point))) {
      best = &row;
    }
  }
  if (best == nullptr) throw Error("select: every grid point failed");
  return best->point;
}

GridOutcome grid_search(
    const ExperimentSpec& spec, const PreparedData& data,
    const std::function<void(const RunResult&)>& on_result) {
  staged("spec", [&] {
    spec.validate();
    return 0;
  });
  GridOutcome out;
  out.runs.reserve(spec.grid.size() * spec.seeds.size());
  for (std::uint64_t seed : spec.seeds) {
    const data::SplitSet splits = splits_for_seed(spec, data.graph, seed);
    for (int units : spec.grid.units) {
      for (double radius : spec.grid.radius_multiple) {
        for (double scaling : spec.grid.input_scaling) {
          for (RunResult& r :
               evaluate_embedding(spec, data, splits, radius, scaling, units, seed)) {
            if (!r.ok) {
              spdlog::warn("grid point H={} radius={} scaling={} lambda={} seed={} failed: {}",
                           r.point.units, r.point.radius_multiple,
                           r.point.input_scaling, r.point.lambda, r.seed, r.error);
            }
            if (on_result) on_result(r);
            out.runs.push_back(std::move(r));
          }
        }
      }
    }
  }

  out.summary = summarize(out.runs);
  out.best = select_best(out.summary);
  for (const RunResult& r : out.runs) {
    if (r.point == out.best) out.best_runs.push_back(r);
  }
  const double n = static_cast<double>(out.best_runs.size());
  for (const RunResult& r : out.best_runs) {
    out.best_test_mean += r.test.mean_accuracy / n;
    out.best_ci_low += r.test.ci_low / n;
    out.best_ci_high += r.test.ci_high / n;
  }
  if (out.best_runs.size() > 1) {
    double ss = 0.0;
    for (const RunResult& r : out.best_runs) {
      const double d = r.test.mean_accuracy - out.best_test_mean;
      ss += d * d;
    }
    out.best_test_std = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

GridOutcome grid_search(
    const ExperimentSpec& spec,
    const std::function<void(const RunResult&)>& on_result) {
  staged("spec", [&] {
    spec.validate();
    return 0;
  });
  return grid_search(spec, prepare(spec), on_result);
}

}  // namespace gesn::bench
