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
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gesn/bench.hpp"
#include "gesn/error.hpp"

namespace gesn::bench {
namespace {

using nlohmann::json;

constexpr std::size_t kDumpHeaderBytes = 64;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* neighbor_mode_name(NeighborMode m) {
  switch (m) {
    case NeighborMode::kIn: return "in";
    case NeighborMode::kOut: return "out";
    case NeighborMode::kBoth: return "both";
  }
  return "in";
}

NeighborMode parse_neighbor_mode(const std::string& s) {
  if (s == "in") return NeighborMode::kIn;
  if (s == "out") return NeighborMode::kOut;
  if (s == "both") return NeighborMode::kBoth;
  throw Error("spec: neighbors must be in, out or both (got '" + s + "')");
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const RunResult& r) {
  json j;
  j["dataset"] = r.dataset;
  j["config"] = {{"radius_multiple", r.point.radius_multiple},
                 {"input_scaling", r.point.input_scaling},
                 {"units", r.point.units},
                 {"lambda", r.point.lambda},
                 {"seed", r.seed}};
  j["alpha"] = r.alpha;
  j["target_radius"] = r.target_radius;
  j["status"] = r.ok ? "ok" : "failed";
  if (!r.ok) j["error"] = r.error;
  j["val_accuracy"] = r.val_accuracy;
  j["test_accuracy"] = r.test_accuracy;
  j["test"] = {{"mean", r.test.mean_accuracy},
               {"ci_low", r.test.ci_low},
               {"ci_high", r.test.ci_high},
               {"resamples", r.test.num_resamples},
               {"confidence", r.test.confidence},
               {"seed", r.test.seed}};
  j["time"] = {{"embed", r.times.embed},
               {"fit", r.times.fit},
               {"eval", r.times.eval},
               {"total", r.times.total}};
  return j;
}

RunResult run_result_from_json(const json& j) {
  try {
    RunResult r;
    read_opt(j, "dataset", r.dataset);
    const json& c = j.at("config");
    r.point.radius_multiple = c.at("radius_multiple").get<double>();
    r.point.input_scaling = c.at("input_scaling").get<double>();
    r.point.units = c.at("units").get<int>();
    r.point.lambda = c.at("lambda").get<double>();
    r.seed = c.at("seed").get<std::uint64_t>();
    read_opt(j, "alpha", r.alpha);
    read_opt(j, "target_radius", r.target_radius);
    r.ok = j.value("status", std::string("ok")) == "ok";
    read_opt(j, "error", r.error);
    read_opt(j, "val_accuracy", r.val_accuracy);
    read_opt(j, "test_accuracy", r.test_accuracy);
    if (j.contains("test")) {
      const json& t = j.at("test");
      r.test.mean_accuracy = t.at("mean").get<double>();
      r.test.ci_low = t.at("ci_low").get<double>();
      r.test.ci_high = t.at("ci_high").get<double>();
      read_opt(t, "resamples", r.test.num_resamples);
      read_opt(t, "confidence", r.test.confidence);
      read_opt(t, "seed", r.test.seed);
    }
    if (j.contains("time")) {
      const json& t = j.at("time");
      read_opt(t, "embed", r.times.embed);
      read_opt(t, "fit", r.times.fit);
      read_opt(t, "eval", r.times.eval);
      read_opt(t, "total", r.times.total);
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("results: malformed record: ") + e.what());
  }
}

json to_json(const ExperimentSpec& spec) {
  json j;
  j["dataset"] = spec.dataset;
  j["data_dir"] = spec.data_dir.string();
  j["undirected"] = spec.undirected;
  j["lcc"] = spec.lcc;
  j["grid"] = {{"radius_multiple", spec.grid.radius_multiple},
               {"input_scaling", spec.grid.input_scaling},
               {"units", spec.grid.units},
               {"lambda", spec.grid.lambda}};
  j["K"] = spec.iterations;
  j["convergence_tol"] = spec.convergence_tol;
  j["neighbors"] = neighbor_mode_name(spec.neighbors);
  j["seeds"] = spec.seeds;
  if (spec.split.file) {
    j["split"] = {{"file", spec.split.file->string()}};
  } else {
    const auto& f = spec.split.fractions;
    j["split"] = {{"fractions", {f.train, f.val, f.test}},
                  {"seed", spec.split.seed},
                  {"stratified", spec.split.stratified},
                  {"vary_with_seed", spec.split.vary_with_seed}};
  }
  j["bootstrap"] = {{"resamples", spec.bootstrap.resamples},
                    {"confidence", spec.bootstrap.confidence}};
  return j;
}

ExperimentSpec spec_from_json(const json& j) {
  ExperimentSpec spec;
  try {
    spec.dataset = j.at("dataset").get<std::string>();
    if (j.contains("data_dir")) spec.data_dir = j.at("data_dir").get<std::string>();
    read_opt(j, "undirected", spec.undirected);
    read_opt(j, "lcc", spec.lcc);
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      read_opt(g, "radius_multiple", spec.grid.radius_multiple);
      read_opt(g, "input_scaling", spec.grid.input_scaling);
      read_opt(g, "units", spec.grid.units);
      read_opt(g, "lambda", spec.grid.lambda);
    }
    read_opt(j, "K", spec.iterations);
    read_opt(j, "convergence_tol", spec.convergence_tol);
    if (j.contains("neighbors")) {
      spec.neighbors = parse_neighbor_mode(j.at("neighbors").get<std::string>());
    }
    read_opt(j, "seeds", spec.seeds);
    if (j.contains("split")) {
      const json& s = j.at("split");
      if (s.contains("file")) spec.split.file = s.at("file").get<std::string>();
      if (s.contains("fractions")) {
        const auto f = s.at("fractions").get<std::vector<double>>();
        if (f.size() != 3) throw Error("spec: split.fractions needs three values");
        spec.split.fractions = {f[0], f[1], f[2]};
      }
      read_opt(s, "seed", spec.split.seed);
      read_opt(s, "stratified", spec.split.stratified);
      read_opt(s, "vary_with_seed", spec.split.vary_with_seed);
    }
    if (j.contains("bootstrap")) {
      read_opt(j.at("bootstrap"), "resamples", spec.bootstrap.resamples);
      read_opt(j.at("bootstrap"), "confidence", spec.bootstrap.confidence);
    }
  } catch (const json::exception& e) {
    throw Error(std::string("spec: ") + e.what());
  }
  return spec;
}

std::vector<RunResult> read_results_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("results: cannot open " + path.string());
  std::vector<RunResult> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(run_result_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return out;
}

std::string heatmap_csv(const std::vector<RunResult>& runs,
                        std::optional<int> units,
                        std::optional<double> lambda) {
  std::set<int> all_units;
  std::set<double> all_lambdas;
  for (const RunResult& r : runs) {
    all_units.insert(r.point.units);
    all_lambdas.insert(r.point.lambda);
  }
  auto list = [](const auto& values) {
    std::ostringstream s;
    for (auto it = values.begin(); it != values.end(); ++it) {
      if (it != values.begin()) s << ", ";
      s << *it;
    }
    return s.str();
  };
  if (!units) {
    if (all_units.size() != 1) {
      throw Error("heatmap: results hold several H values (" + list(all_units) +
                  "); choose one");
    }
    units = *all_units.begin();
  }
  if (!lambda) {
    if (all_lambdas.size() != 1) {
      throw Error("heatmap: results hold several lambda values (" +
                  list(all_lambdas) + "); choose one");
    }
    lambda = *all_lambdas.begin();
  }

  struct Cell {
    double test = 0.0, low = 0.0, high = 0.0;
    int count = 0;
  };
  std::set<double> radii, scalings;
  std::map<std::pair<double, double>, Cell> cells;
  for (const RunResult& r : runs) {
    if (r.point.units != *units || r.point.lambda != *lambda) continue;
    radii.insert(r.point.radius_multiple);
    scalings.insert(r.point.input_scaling);
    if (!r.ok) continue;
    Cell& c = cells[{r.point.radius_multiple, r.point.input_scaling}];
    c.test += r.test.mean_accuracy;
    c.low += r.test.ci_low;
    c.high += r.test.ci_high;
    ++c.count;
  }
  if (radii.empty()) {
    throw Error("heatmap: no results for H=" + std::to_string(*units) +
                " lambda=" + format_double(*lambda));
  }
  std::vector<std::string> missing;
  for (double r : radii) {
    for (double s : scalings) {
      if (!cells.count({r, s})) {
        missing.push_back("(radius_multiple=" + format_double(r) +
                          ", input_scaling=" + format_double(s) + ")");
      }
    }
  }
  if (!missing.empty()) {
    std::string msg = "heatmap: incomplete radius x scaling grid, missing";
    for (const auto& m : missing) msg += " " + m;
    throw Error(msg);
  }

  std::ostringstream csv;
  csv << "radius_multiple,input_scaling,mean_test_accuracy,ci_low,ci_high\n";
  for (const auto& [key, c] : cells) {
    csv << format_double(key.first) << ',' << format_double(key.second) << ','
        << format_double(c.test / c.count) << ',' << format_double(c.low / c.count)
        << ',' << format_double(c.high / c.count) << '\n';
  }
  return csv.str();
}

void write_matrix_dump(const std::filesystem::path& path,
                       const EmbeddingMatrix& m, MatrixFormat format) {
  const auto h = m.states.rows();
  const auto n = m.states.cols();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("embed-dump: cannot write " + path.string());
  std::string header = std::to_string(h) + " " + std::to_string(n) + " " +
                       std::to_string(m.iterations_run);
  if (format == MatrixFormat::kText) {
    out << header << '\n';
    for (Eigen::Index i = 0; i < h; ++i) {
      for (Eigen::Index v = 0; v < n; ++v) {
        if (v) out << ' ';
        out << format_double(m.states(i, v));
      }
      out << '\n';
    }
  } else {
    header.resize(kDumpHeaderBytes - 1, ' ');
    header.push_back('\n');
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    static_assert(std::endian::native == std::endian::little,
                  "binary dumps are written in native little-endian order");
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        rows = m.states;
    out.write(reinterpret_cast<const char*>(rows.data()),
              static_cast<std::streamsize>(rows.size() * sizeof(double)));
  }
  if (!out) throw Error("embed-dump: write failed for " + path.string());
}

EmbeddingMatrix read_matrix_dump(const std::filesystem::path& path,
                                 MatrixFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("embed-dump: cannot open " + path.string());
  std::string header;
  if (format == MatrixFormat::kBinary) {
    header.resize(kDumpHeaderBytes);
    in.read(header.data(), kDumpHeaderBytes);
    if (in.gcount() != static_cast<std::streamsize>(kDumpHeaderBytes)) {
      throw ParseError(path.string(), 1, "truncated header");
    }
  } else {
    std::getline(in, header);
  }
  long long h = -1, n = -1;
  int k = -1;
  std::istringstream hs(header);
  if (!(hs >> h >> n >> k) || h < 0 || n < 0 || k < 0) {
    throw ParseError(path.string(), 1, "expected header 'H N iteration'");
  }
  EmbeddingMatrix m;
  m.iterations_run = k;
  if (format == MatrixFormat::kBinary) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(h, n);
    in.read(reinterpret_cast<char*>(rows.data()),
            static_cast<std::streamsize>(rows.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(rows.size() * sizeof(double))) {
      throw ParseError(path.string(), 2, "truncated matrix data");
    }
    m.states = rows;
  } else {
    m.states.resize(h, n);
    for (long long i = 0; i < h; ++i) {
      for (long long v = 0; v < n; ++v) {
        if (!(in >> m.states(i, v))) {
          throw ParseError(path.string(), static_cast<int>(i + 2), "missing value");
        }
      }
    }
  }
  return m;
}

std::vector<std::filesystem::path> export_embeddings(
    const ExperimentSpec& spec, std::uint64_t seed,
    const std::vector<int>& checkpoints, const std::filesystem::path& out_dir,
    MatrixFormat format) {
  spec.validate();
  if (spec.grid.radius_multiple.size() != 1 ||
      spec.grid.input_scaling.size() != 1 || spec.grid.units.size() != 1) {
    throw Error("embed-dump: needs exactly one radius, scaling and H");
  }
  const PreparedData data = prepare(spec);
  ReservoirConfig cfg;
  cfg.units = spec.grid.units[0];
  cfg.input_scaling = spec.grid.input_scaling[0];
  cfg.target_radius = resolve_radius(spec.grid.radius_multiple[0], data.alpha);
  cfg.seed = seed;
  cfg.max_iterations = spec.iterations;
  cfg.convergence_tol = spec.convergence_tol;
  cfg.neighbors = spec.neighbors;

  std::vector<EmbeddingMatrix> states;
  try {
    cfg.validate();
    const ReservoirWeights w = init_reservoir(cfg, data.graph.num_features());
    states = state_trajectory(data.graph, w, cfg, checkpoints);
  } catch (const std::exception& e) {
    throw Error(std::string("embed: ") + e.what());
  }
  std::filesystem::create_directories(out_dir);
  const char* ext = format == MatrixFormat::kBinary ? ".bin" : ".txt";
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    // the header records the checkpoint, even after early convergence
    EmbeddingMatrix snapshot = states[i];
    snapshot.iterations_run = checkpoints[i];
    const auto path =
        out_dir / ("embeddings_k" + std::to_string(checkpoints[i]) + ext);
    write_matrix_dump(path, snapshot, format);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace gesn::bench
