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

#include "gesn/reservoir.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <utility>

#include "gesn/error.hpp"
#include "gesn/kernels.hpp"
#include "gesn/linalg.hpp"

namespace gesn {
namespace {

constexpr double kDegenerateRadius = 1e-12;
constexpr std::uint64_t kRecurrentStream = 0x52454355ULL;  // "RECU"
constexpr std::uint64_t kInputStream = 0x494e5055ULL;      // "INPU"

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols,
                               std::uint64_t seed, std::uint64_t stream) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(stream)));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  // column-major fill order is part of the determinism contract
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = unif(rng);
  }
  return m;
}

// Neighbor lists for the recurrent sum, as a CSR over destination nodes.
struct NeighborLists {
  std::vector<std::int64_t> offsets;
  std::vector<std::int32_t> indices;
};

NeighborLists neighbor_lists(const SparseGraph& g, NeighborMode mode) {
  NeighborLists lists;
  const int n = g.num_nodes();
  lists.offsets.reserve(static_cast<std::size_t>(n) + 1);
  lists.offsets.push_back(0);
  std::vector<std::int32_t> merged;
  for (int v = 0; v < n; ++v) {
    const auto in = g.in_neighbors(v);
    const auto out = g.out_neighbors(v);
    switch (mode) {
      case NeighborMode::kIn:
        lists.indices.insert(lists.indices.end(), in.begin(), in.end());
        break;
      case NeighborMode::kOut:
        lists.indices.insert(lists.indices.end(), out.begin(), out.end());
        break;
      case NeighborMode::kBoth:
        merged.clear();
        std::set_union(in.begin(), in.end(), out.begin(), out.end(),
                       std::back_inserter(merged));
        lists.indices.insert(lists.indices.end(), merged.begin(), merged.end());
        break;
    }
    lists.offsets.push_back(static_cast<std::int64_t>(lists.indices.size()));
  }
  return lists;
}

std::span<double> column(Eigen::MatrixXd& m, Eigen::Index j) {
  return {m.data() + j * m.rows(), static_cast<std::size_t>(m.rows())};
}

// Runs the state iteration, calling `observe(k, result)` after every
// step k >= 1. Stops when observe returns false, at K, or on convergence.
template <typename Observer>
EmbeddingMatrix iterate(const SparseGraph& g, const ReservoirWeights& w,
                        const ReservoirConfig& cfg,
                        const Eigen::MatrixXd* initial_state,
                        Observer&& observe) {
  cfg.validate();
  const Eigen::Index h = w.w_hat.rows();
  const Eigen::Index n = g.num_nodes();
  if (w.w_hat.cols() != h || w.w_in.rows() != h) {
    throw Error("compute_embeddings: inconsistent reservoir weight shapes");
  }
  if (w.w_in.cols() != g.num_features()) {
    throw Error("compute_embeddings: W_in expects " +
                std::to_string(w.w_in.cols()) + " features, graph has " +
                std::to_string(g.num_features()));
  }
  if (initial_state != nullptr &&
      (initial_state->rows() != h || initial_state->cols() != n)) {
    throw Error("compute_embeddings: initial state must be H x N");
  }

  const NeighborLists nbrs = neighbor_lists(g, cfg.neighbors);
  const Eigen::MatrixXd input = w.w_in * g.features().transpose();  // H x N

  EmbeddingMatrix result;
  result.states = initial_state != nullptr ? *initial_state
                                           : Eigen::MatrixXd::Zero(h, n);
  bool state_is_zero = initial_state == nullptr || initial_state->isZero(0.0);

  Eigen::MatrixXd recurrent(h, n);  // W_hat * states
  Eigen::MatrixXd next(h, n);
  const auto& k = kernels::active();
  if (!k.all_finite(input.data(), static_cast<std::size_t>(input.size()))) {
    throw Error("compute_embeddings: non-finite input term W_in x_v");
  }
  for (int step = 1; step <= cfg.max_iterations; ++step) {
    if (state_is_zero) {
      next.setZero();
    } else {
      recurrent.noalias() = w.w_hat * result.states;
      next.setZero();
      for (Eigen::Index v = 0; v < n; ++v) {
        auto dst = column(next, v);
        for (auto e = nbrs.offsets[v]; e < nbrs.offsets[v + 1]; ++e) {
          const auto src = column(recurrent, nbrs.indices[e]);
          k.axpy(1.0, src.data(), dst.data(), dst.size());
        }
      }
    }
    if (!k.all_finite(next.data(), static_cast<std::size_t>(next.size()))) {
      throw Error("compute_embeddings: non-finite pre-activation at iteration " +
                  std::to_string(step));
    }
    k.add_tanh(input.data(), next.data(), next.data(),
               static_cast<std::size_t>(next.size()));
    const double delta =
        n == 0 ? 0.0
               : k.max_abs_diff(next.data(), result.states.data(),
                                static_cast<std::size_t>(next.size()));
    result.states.swap(next);
    result.iterations_run = step;
    result.final_delta = delta;
    state_is_zero = false;
    const bool converged = cfg.convergence_tol > 0.0 && delta < cfg.convergence_tol;
    result.converged = converged;
    if (!observe(step, result) || converged) break;
  }
  return result;
}

}  // namespace

void ReservoirConfig::validate() const {
  if (units < 1) throw Error("reservoir: units (H) must be >= 1");
  if (!(input_scaling > 0.0) || !std::isfinite(input_scaling)) {
    throw Error("reservoir: input_scaling must be positive");
  }
  if (!(target_radius > 0.0) || !std::isfinite(target_radius)) {
    throw Error("reservoir: target_radius must be positive");
  }
  if (max_iterations < 0) throw Error("reservoir: K must be >= 0");
  if (!(convergence_tol >= 0.0)) {
    throw Error("reservoir: convergence_tol must be >= 0");
  }
}

RawRadius raw_recurrent_radius(std::uint64_t seed, int units) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, int>, RawRadius> memo;
  const auto key = std::make_pair(seed, units);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  std::uint64_t s = seed;
  double radius = dense_spectral_radius(uniform_matrix(units, units, s, kRecurrentStream));
  while (radius < kDegenerateRadius) {
    spdlog::warn("reservoir: degenerate recurrent draw (rho={}) for seed {}, "
                 "redrawing with seed {}",
                 radius, s, s + 1);
    ++s;
    radius = dense_spectral_radius(uniform_matrix(units, units, s, kRecurrentStream));
  }
  const RawRadius value{radius, s};
  std::lock_guard<std::mutex> lock(mu);
  memo.emplace(key, value);
  return value;
}

ReservoirWeights init_reservoir(const ReservoirConfig& cfg, int num_features) {
  cfg.validate();
  if (num_features < 0) throw Error("init_reservoir: negative feature count");
  const RawRadius raw = raw_recurrent_radius(cfg.seed, cfg.units);

  ReservoirWeights w;
  w.recurrent_seed = raw.seed;
  w.w_in = uniform_matrix(cfg.units, num_features, cfg.seed, kInputStream) *
           cfg.input_scaling;
  // (entry / rho) * target keeps H = 1 exact: entry / |entry| is +-1.
  w.w_hat = (uniform_matrix(cfg.units, cfg.units, raw.seed, kRecurrentStream) /
             raw.radius) *
            cfg.target_radius;
  // eigenvalues scale with the matrix
  w.achieved_radius = raw.radius * (cfg.target_radius / raw.radius);
  return w;
}

EmbeddingMatrix compute_embeddings(const SparseGraph& g,
                                   const ReservoirWeights& w,
                                   const ReservoirConfig& cfg) {
  return iterate(g, w, cfg, nullptr,
                 [](int, const EmbeddingMatrix&) { return true; });
}

EmbeddingMatrix compute_embeddings(const SparseGraph& g,
                                   const ReservoirWeights& w,
                                   const ReservoirConfig& cfg,
                                   const Eigen::MatrixXd& initial_state) {
  return iterate(g, w, cfg, &initial_state,
                 [](int, const EmbeddingMatrix&) { return true; });
}

std::vector<EmbeddingMatrix> state_trajectory(const SparseGraph& g,
                                              const ReservoirWeights& w,
                                              const ReservoirConfig& cfg,
                                              std::span<const int> checkpoints) {
  cfg.validate();
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 0 || checkpoints[i] > cfg.max_iterations) {
      throw Error("state_trajectory: checkpoint " +
                  std::to_string(checkpoints[i]) + " outside [0, K=" +
                  std::to_string(cfg.max_iterations) + "]");
    }
    if (i > 0 && checkpoints[i] < checkpoints[i - 1]) {
      throw Error("state_trajectory: checkpoints must be sorted ascending");
    }
  }
  std::vector<EmbeddingMatrix> snapshots;
  snapshots.reserve(checkpoints.size());
  std::size_t next = 0;
  EmbeddingMatrix zero;
  zero.states = Eigen::MatrixXd::Zero(w.w_hat.rows(), g.num_nodes());
  while (next < checkpoints.size() && checkpoints[next] == 0) {
    snapshots.push_back(zero);
    ++next;
  }
  if (next == checkpoints.size()) return snapshots;

  ReservoirConfig run_cfg = cfg;
  run_cfg.max_iterations = checkpoints.back();
  const EmbeddingMatrix last = iterate(
      g, w, run_cfg, nullptr, [&](int step, const EmbeddingMatrix& current) {
        while (next < checkpoints.size() && checkpoints[next] == step) {
          snapshots.push_back(current);
          ++next;
        }
        return next < checkpoints.size();
      });
  // Converged early: later checkpoints see the stationary state.
  while (next < checkpoints.size()) {
    snapshots.push_back(last);
    ++next;
  }
  return snapshots;
}

}  // namespace gesn
