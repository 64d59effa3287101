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

#ifndef GESN_KERNELS_HPP_
#define GESN_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

// Data-parallel inner loops shared by the reservoir iteration, the power
// iterations and the readout. Every kernel has a scalar reference
// implementation; vectorized variants are selected once at startup from the
// CPU features (or forced with GESN_SIMD=scalar|avx2|simd) and are
// equivalence-tested against the reference.
namespace gesn::kernels {

enum class Isa {
  kScalar,
  kAvx2,          // x86-64 AVX2+FMA intrinsics
  kPortableSimd,  // std::experimental::native_simd (NEON on aarch64)
};

std::string_view isa_name(Isa isa);

struct KernelTable {
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // max_i |a[i] - b[i]|; NaN if any difference is NaN
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  // out[i] = tanh(bias[i] + pre[i]); out may alias pre
  void (*add_tanh)(const double* bias, const double* pre, double* out,
                   std::size_t n);
  // true iff every entry is finite
  bool (*all_finite)(const double* a, std::size_t n);
};

// Variants compiled into this binary and supported by the running CPU.
std::vector<Isa> available_isas();

// Throws std::invalid_argument if `isa` is not available.
const KernelTable& table(Isa isa);

// The table picked at first use: GESN_SIMD if set, else the widest available.
const KernelTable& active();
Isa active_isa();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), y.size());
}

inline double max_abs_diff(std::span<const double> a,
                           std::span<const double> b) {
  return active().max_abs_diff(a.data(), b.data(), a.size());
}

inline void add_tanh(std::span<const double> bias, std::span<const double> pre,
                     std::span<double> out) {
  active().add_tanh(bias.data(), pre.data(), out.data(), out.size());
}

inline bool all_finite(std::span<const double> a) {
  return active().all_finite(a.data(), a.size());
}

}  // namespace gesn::kernels

#endif  // GESN_KERNELS_HPP_
