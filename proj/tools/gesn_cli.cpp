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

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gesn/bench.hpp"
#include "gesn/dataset.hpp"
#include "gesn/error.hpp"
#include "gesn/graph.hpp"
#include "gesn/kernels.hpp"
#include "gesn/sensitivity.hpp"

namespace {

using namespace gesn;
using bench::ExperimentSpec;

// Options shared by `run` and `embed-dump`.
struct PointOptions {
  double radius_multiple = 1.0;
  double scaling = 1.0;
  int units = 256;
  double lambda = 1e-3;
  std::uint64_t seed = 0;
  std::string neighbors = "in";
  double tol = 0.0;
};

void add_dataset_options(CLI::App* cmd, ExperimentSpec& spec) {
  cmd->add_option("--dataset", spec.dataset, "Dataset name (file stem)")->required();
  cmd->add_option("--data-dir", spec.data_dir, "Directory with canonical files")
      ->required();
  cmd->add_flag("--undirected", spec.undirected, "Symmetrize arcs before use");
  cmd->add_flag("--lcc", spec.lcc, "Restrict to the largest connected component");
}

void add_point_options(CLI::App* cmd, ExperimentSpec& spec, PointOptions& p) {
  cmd->add_option("--radius-mult", p.radius_multiple, "Reservoir radius as a multiple of 1/alpha")
      ->required();
  cmd->add_option("--scaling", p.scaling, "Input scaling")->required();
  cmd->add_option("--units", p.units, "Reservoir units H")->required();
  cmd->add_option("--K", spec.iterations, "State iterations")->capture_default_str();
  cmd->add_option("--seed", p.seed, "Reservoir and split seed")->capture_default_str();
  cmd->add_option("--neighbors", p.neighbors, "Neighbor set for directed graphs")
      ->check(CLI::IsMember({"in", "out", "both"}))
      ->capture_default_str();
  cmd->add_option("--convergence-tol", p.tol, "Stop early below this state change")
      ->capture_default_str();
}

void apply_point(ExperimentSpec& spec, const PointOptions& p, bool with_lambda) {
  spec.grid.radius_multiple = {p.radius_multiple};
  spec.grid.input_scaling = {p.scaling};
  spec.grid.units = {p.units};
  spec.grid.lambda = {with_lambda ? p.lambda : 1.0};
  spec.seeds = {p.seed};
  spec.convergence_tol = p.tol;
  spec.neighbors = p.neighbors == "out"    ? NeighborMode::kOut
                   : p.neighbors == "both" ? NeighborMode::kBoth
                                           : NeighborMode::kIn;
}

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("split: bad fraction '" + item + "'");
    }
  }
  if (out.size() != 3) throw Error("split: --split-frac needs three comma-separated values");
  return out;
}

// Appends JSON lines under a lock so concurrent producers never interleave.
class JsonlAppender {
 public:
  explicit JsonlAppender(const std::filesystem::path& path)
      : out_(path, std::ios::app) {
    if (!out_) throw Error("output: cannot open " + path.string());
  }
  void append(const nlohmann::json& j) {
    std::lock_guard lock(mu_);
    out_ << j.dump() << '\n';
    out_.flush();
  }

 private:
  std::mutex mu_;
  std::ofstream out_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_run(const bench::RunResult& r) {
  std::printf(
      "%s H=%d radius_mult=%g scaling=%g lambda=%g seed=%llu alpha=%.6g\n"
      "  val_acc=%.4f test_acc=%.4f bootstrap=%.4f [%.4f, %.4f]\n"
      "  time embed=%.3fs fit=%.3fs eval=%.3fs total=%.3fs\n",
      r.dataset.c_str(), r.point.units, r.point.radius_multiple,
      r.point.input_scaling, r.point.lambda,
      static_cast<unsigned long long>(r.seed), r.alpha, r.val_accuracy,
      r.test_accuracy, r.test.mean_accuracy, r.test.ci_low, r.test.ci_high,
      r.times.embed, r.times.fit, r.times.eval, r.times.total);
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<bench::GridSummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("output: cannot write " + path.string());
  out << "units,radius_multiple,input_scaling,lambda,mean_val_accuracy,"
         "mean_test_accuracy,mean_ci_low,mean_ci_high,num_seeds,status\n";
  for (const auto& r : rows) {
    out << r.point.units << ',' << fmt(r.point.radius_multiple) << ','
        << fmt(r.point.input_scaling) << ',' << fmt(r.point.lambda) << ','
        << fmt(r.mean_val_accuracy) << ',' << fmt(r.mean_test_accuracy) << ','
        << fmt(r.mean_ci_low) << ',' << fmt(r.mean_ci_high) << ','
        << r.num_seeds << ',' << (r.failed ? "failed" : "ok") << '\n';
  }
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(std::string(what) + ": bad integer '" + item + "'");
    }
  }
  if (out.empty()) throw Error(std::string(what) + ": empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph Echo State Network benchmark harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gesn 0.1.0");

  // run
  ExperimentSpec run_spec;
  PointOptions run_point;
  std::string split_file, split_frac = "0.6,0.2,0.2", run_out;
  std::uint64_t split_seed = 0;
  bool unstratified = false;
  auto* run = app.add_subcommand("run", "Evaluate one configuration");
  add_dataset_options(run, run_spec);
  add_point_options(run, run_spec, run_point);
  run->add_option("--lambda", run_point.lambda, "Ridge regularization")->required();
  auto* split_file_opt =
      run->add_option("--split-file", split_file, "Split file with #train/#val/#test");
  run->add_option("--split-frac", split_frac, "train,val,test fractions")
      ->excludes(split_file_opt)
      ->capture_default_str();
  run->add_option("--split-seed", split_seed, "Base seed for generated splits")
      ->excludes(split_file_opt);
  run->add_flag("--unstratified", unstratified, "Shuffle without stratifying by class")
      ->excludes(split_file_opt);
  run->add_option("--bootstrap", run_spec.bootstrap.resamples, "Bootstrap resamples")
      ->capture_default_str();
  run->add_option("--confidence", run_spec.bootstrap.confidence, "Interval confidence")
      ->capture_default_str();
  run->add_option("--out", run_out, "Append the result to this JSON-lines file");

  // grid
  std::string grid_spec_path, grid_out, grid_data_dir;
  auto* grid = app.add_subcommand("grid", "Grid search with validation model selection");
  grid->add_option("--spec", grid_spec_path, "Experiment spec JSON")->required();
  grid->add_option("--out", grid_out, "Output directory")->required();
  grid->add_option("--data-dir", grid_data_dir, "Override the spec's data_dir");

  // heatmap
  std::string heat_in, heat_out;
  std::optional<int> heat_units;
  std::optional<double> heat_lambda;
  auto* heatmap = app.add_subcommand("heatmap", "Radius x scaling accuracy table");
  heatmap->add_option("--in", heat_in, "results.jsonl")->required();
  heatmap->add_option("--out", heat_out, "CSV path (stdout if omitted)");
  heatmap->add_option("--units", heat_units, "Fix H when results hold several");
  heatmap->add_option("--lambda", heat_lambda, "Fix lambda when results hold several");

  // embed-dump
  ExperimentSpec dump_spec;
  PointOptions dump_point;
  std::string checkpoints = "1,10,100", dump_out, dump_format = "binary";
  auto* dump = app.add_subcommand("embed-dump", "Write reservoir states at checkpoints");
  add_dataset_options(dump, dump_spec);
  add_point_options(dump, dump_spec, dump_point);
  dump->add_option("--checkpoints", checkpoints, "Comma-separated iterations")
      ->capture_default_str();
  dump->add_option("--out", dump_out, "Output directory")->required();
  dump->add_option("--format", dump_format, "binary or text")
      ->check(CLI::IsMember({"binary", "text"}))
      ->capture_default_str();

  // stats
  ExperimentSpec stats_spec;
  bool stats_check = false, stats_json = false;
  auto* stats = app.add_subcommand("stats", "Graph statistics against published values");
  add_dataset_options(stats, stats_spec);
  stats->add_flag("--check", stats_check, "Exit nonzero when any field disagrees");
  stats->add_flag("--json", stats_json, "Print JSON instead of a table");

  // sensitivity
  ExperimentSpec sens_spec;
  int sens_hidden = 4, sens_depth = 2;
  std::uint64_t sens_seed = 0;
  std::string sens_sources = "0", sens_targets, sens_out;
  double sens_eps = 1e-5, sens_scale = 1.0;
  auto* sens = app.add_subcommand(
      "sensitivity", "Jacobian norms of an untrained GCN against the adjacency bound");
  add_dataset_options(sens, sens_spec);
  sens->add_option("--hidden", sens_hidden, "Hidden width")->capture_default_str();
  sens->add_option("--depth", sens_depth, "Number of layers")->capture_default_str();
  sens->add_option("--seed", sens_seed, "Weight seed")->capture_default_str();
  sens->add_option("--weight-scale", sens_scale, "Uniform weight half-width")
      ->capture_default_str();
  sens->add_option("--sources", sens_sources, "Comma-separated source nodes")
      ->capture_default_str();
  sens->add_option("--targets", sens_targets, "Comma-separated target nodes (default: all)");
  sens->add_option("--epsilon", sens_eps, "Finite-difference step")->capture_default_str();
  sens->add_option("--out", sens_out, "CSV path (stdout if omitted)");

  auto* kernels_cmd = app.add_subcommand("kernels", "List kernel variants for this CPU");

  CLI11_PARSE(app, argc, argv);

  try {
    if (kernels_cmd->parsed()) {
      for (kernels::Isa isa : kernels::available_isas()) {
        std::printf("%s%s\n", std::string(kernels::isa_name(isa)).c_str(),
                    isa == kernels::active_isa() ? " (active)" : "");
      }
    } else if (run->parsed()) {
      apply_point(run_spec, run_point, true);
      if (!split_file.empty()) {
        run_spec.split.file = split_file;
      } else {
        const auto f = parse_fractions(split_frac);
        run_spec.split.fractions = {f[0], f[1], f[2]};
        run_spec.split.seed = split_seed;
        run_spec.split.stratified = !unstratified;
      }
      const bench::RunResult r = bench::run_single(run_spec, run_point.seed);
      print_run(r);
      if (!run_out.empty()) JsonlAppender(run_out).append(bench::to_json(r));
    } else if (grid->parsed()) {
      std::ifstream in(grid_spec_path);
      if (!in) throw Error("spec: cannot open " + grid_spec_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("spec: ") + e.what());
      }
      ExperimentSpec spec = bench::spec_from_json(j);
      if (!grid_data_dir.empty()) spec.data_dir = grid_data_dir;
      std::filesystem::create_directories(grid_out);
      const auto results_path = std::filesystem::path(grid_out) / "results.jsonl";
      std::filesystem::remove(results_path);
      JsonlAppender appender(results_path);
      const auto outcome = bench::grid_search(spec, [&](const bench::RunResult& r) {
        appender.append(bench::to_json(r));
      });
      write_summary_csv(std::filesystem::path(grid_out) / "summary.csv", outcome.summary);
      nlohmann::json best;
      best["dataset"] = spec.dataset;
      best["config"] = {{"radius_multiple", outcome.best.radius_multiple},
                        {"input_scaling", outcome.best.input_scaling},
                        {"units", outcome.best.units},
                        {"lambda", outcome.best.lambda}};
      best["test_mean"] = outcome.best_test_mean;
      best["test_std"] = outcome.best_test_std;
      best["ci_low"] = outcome.best_ci_low;
      best["ci_high"] = outcome.best_ci_high;
      best["per_seed"] = nlohmann::json::array();
      for (const auto& r : outcome.best_runs) best["per_seed"].push_back(bench::to_json(r));
      std::ofstream(std::filesystem::path(grid_out) / "best.json") << best.dump(2) << '\n';
      std::printf("best H=%d radius_mult=%g scaling=%g lambda=%g: test %.4f +- %.4f "
                  "[%.4f, %.4f] over %zu seeds\n",
                  outcome.best.units, outcome.best.radius_multiple,
                  outcome.best.input_scaling, outcome.best.lambda,
                  outcome.best_test_mean, outcome.best_test_std, outcome.best_ci_low,
                  outcome.best_ci_high, outcome.best_runs.size());
    } else if (heatmap->parsed()) {
      const std::string csv =
          bench::heatmap_csv(bench::read_results_jsonl(heat_in), heat_units, heat_lambda);
      if (heat_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(heat_out);
        if (!out) throw Error("heatmap: cannot write " + heat_out);
        out << csv;
      }
    } else if (dump->parsed()) {
      apply_point(dump_spec, dump_point, false);
      const auto paths = bench::export_embeddings(
          dump_spec, dump_point.seed, parse_int_list(checkpoints, "checkpoints"), dump_out,
          dump_format == "text" ? bench::MatrixFormat::kText : bench::MatrixFormat::kBinary);
      for (const auto& p : paths) std::printf("%s\n", p.string().c_str());
    } else if (stats->parsed()) {
      stats_spec.grid = {{1.0}, {1.0}, {1}, {1.0}};
      const bench::PreparedData data = bench::prepare(stats_spec);
      const GraphStats s = graph_stats(data.graph);
      const bench::DatasetReference* ref = bench::find_reference(stats_spec.dataset);
      bench::StatsComparison cmp;
      if (ref) cmp = bench::compare_stats(s, *ref);
      if (stats_json) {
        nlohmann::json j = {{"dataset", stats_spec.dataset},
                            {"checksum", data.checksum},
                            {"nodes", s.num_nodes},
                            {"edges", s.num_edges},
                            {"arcs", s.num_arcs},
                            {"homophily", s.edge_homophily},
                            {"spectral_radius", s.spectral_radius},
                            {"features", s.num_features},
                            {"classes", s.num_classes}};
        if (ref) j["matches_reference"] = cmp.all();
        std::cout << j.dump(2) << '\n';
      } else {
        auto row = [&](const char* name, const std::string& got,
                       const std::string& want, bool ok) {
          std::printf("%-16s %-14s %-14s %s\n", name, got.c_str(), want.c_str(),
                      ref ? (ok ? "ok" : "MISMATCH") : "");
        };
        std::printf("%s (sha256 %s)\n", stats_spec.dataset.c_str(), data.checksum.c_str());
        std::printf("%-16s %-14s %-14s\n", "field", "computed", ref ? "reference" : "");
        auto num = [](double v, int prec) {
          char b[32];
          std::snprintf(b, sizeof b, "%.*f", prec, v);
          return std::string(b);
        };
        const bool arcs = ref && ref->edge_convention == bench::EdgeConvention::kArcs;
        row("nodes", std::to_string(s.num_nodes), ref ? std::to_string(ref->nodes) : "",
            cmp.nodes);
        row(arcs ? "edges (arcs)" : "edges (pairs)",
            std::to_string(arcs ? s.num_arcs : s.num_edges),
            ref ? std::to_string(ref->edges) : "", cmp.edges);
        row("homophily", num(s.edge_homophily, 4), ref ? num(ref->homophily, 2) : "",
            cmp.homophily);
        row("spectral radius", num(s.spectral_radius, 4), ref ? num(ref->radius, 2) : "",
            cmp.radius);
        row("features", std::to_string(s.num_features),
            ref ? std::to_string(ref->features) : "", cmp.features);
        row("classes", std::to_string(s.num_classes),
            ref ? std::to_string(ref->classes) : "", cmp.classes);
      }
      if (stats_check && (!ref || !cmp.all())) {
        std::fprintf(stderr, "gesn: stats: %s\n",
                     ref ? "statistics differ from the reference"
                         : "no reference row for this dataset");
        return 2;
      }
    } else if (sens->parsed()) {
      sens_spec.grid = {{1.0}, {1.0}, {1}, {1.0}};
      const bench::PreparedData data = bench::prepare(sens_spec);
      const SparseGraph& g = data.graph;
      const auto stack =
          sensitivity::random_gcn_stack(g, sens_hidden, sens_depth, sens_seed, sens_scale);
      std::vector<int> targets;
      if (sens_targets.empty()) {
        for (int v = 0; v < g.num_nodes(); ++v) targets.push_back(v);
      } else {
        targets = parse_int_list(sens_targets, "targets");
      }
      std::vector<sensitivity::SensitivityReport> reports;
      for (int src : parse_int_list(sens_sources, "sources")) {
        for (int v : targets) {
          reports.push_back(sensitivity::sensitivity_report(g, stack, v, src, sens_eps));
        }
      }
      if (sens_out.empty()) {
        sensitivity::write_report_csv(std::cout, reports);
      } else {
        std::ofstream out(sens_out);
        if (!out) throw Error("sensitivity: cannot write " + sens_out);
        sensitivity::write_report_csv(out, reports);
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gesn: %s\n", e.what());
    return 1;
  }
  return 0;
}
