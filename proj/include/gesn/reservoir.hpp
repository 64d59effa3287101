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

#ifndef GESN_RESERVOIR_HPP_
#define GESN_RESERVOIR_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "gesn/graph.hpp"

namespace gesn {

// Which arcs feed a node's recurrent sum.
enum class NeighborMode {
  kIn,    // sources of arcs u -> v (default; all neighbors when undirected)
  kOut,   // targets of arcs v -> u
  kBoth,  // union of the two
};

struct ReservoirConfig {
  int units = 256;             // H
  double input_scaling = 1.0;  // W_in entries drawn from [-s, s]
  double target_radius = 0.9;  // desired rho(W_hat)
  std::uint64_t seed = 0;
  int max_iterations = 100;       // K
  double convergence_tol = 0.0;   // 0: always run exactly K steps
  NeighborMode neighbors = NeighborMode::kIn;

  // Throws Error on H < 1, non-positive scaling or radius, K < 0, tol < 0.
  void validate() const;
};

struct ReservoirWeights {
  Eigen::MatrixXd w_in;   // H x X
  Eigen::MatrixXd w_hat;  // H x H
  double achieved_radius = 0.0;
  // Seed the recurrent matrix was finally drawn with (differs from the
  // configured one only after a degenerate-draw retry).
  std::uint64_t recurrent_seed = 0;
};

struct EmbeddingMatrix {
  Eigen::MatrixXd states;  // H x N, column v is h_v
  int iterations_run = 0;
  bool converged = false;
  double final_delta = 0.0;  // max-norm of the last state change
};

// Uniform[-1, 1] draws; W_in scaled by input_scaling, W_hat scaled so its
// spectral radius (full dense eigenvalue computation) equals target_radius.
// The recurrent matrix depends only on (seed, H), so its raw spectral radius
// is memoized per process.
ReservoirWeights init_reservoir(const ReservoirConfig& cfg, int num_features);

// Spectral radius of the unscaled recurrent draw for (seed, H), together with
// the seed actually used. Memoized.
struct RawRadius {
  double radius;
  std::uint64_t seed;
};
RawRadius raw_recurrent_radius(std::uint64_t seed, int units);

// Synchronous iteration of
//   h_v(k) = tanh(W_in x_v + sum_{u in N(v)} W_hat h_u(k-1)),  h_v(0) = 0
// for K steps, or until the max-norm state change drops below
// convergence_tol when that is positive.
EmbeddingMatrix compute_embeddings(const SparseGraph& g,
                                   const ReservoirWeights& w,
                                   const ReservoirConfig& cfg);

// Same iteration from an arbitrary H x N initial state.
EmbeddingMatrix compute_embeddings(const SparseGraph& g,
                                   const ReservoirWeights& w,
                                   const ReservoirConfig& cfg,
                                   const Eigen::MatrixXd& initial_state);

// Snapshots of one run at the given iteration counts (non-decreasing, each in
// [0, K]). Checkpoint 0 is the zero state.
std::vector<EmbeddingMatrix> state_trajectory(const SparseGraph& g,
                                              const ReservoirWeights& w,
                                              const ReservoirConfig& cfg,
                                              std::span<const int> checkpoints);

}  // namespace gesn

#endif  // GESN_RESERVOIR_HPP_
