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

// Kernels written against std::experimental::native_simd. On aarch64 this
// lowers to NEON; on x86 it follows the baseline ISA of the build.

#include "tables.hpp"

#if __has_include(<experimental/simd>)

#include <cmath>
#include <experimental/simd>
#include <limits>

namespace gesn::kernels::detail {
namespace {

namespace stdx = std::experimental;
using V = stdx::native_simd<double>;
constexpr std::size_t kW = V::size();

inline V load(const double* p) { return V(p, stdx::element_aligned); }
inline void store(const V& v, double* p) { v.copy_to(p, stdx::element_aligned); }

double dot(const double* a, const double* b, std::size_t n) {
  V acc0 = 0.0;
  V acc1 = 0.0;
  std::size_t i = 0;
  for (; i + 2 * kW <= n; i += 2 * kW) {
    acc0 += load(a + i) * load(b + i);
    acc1 += load(a + i + kW) * load(b + i + kW);
  }
  for (; i + kW <= n; i += kW) acc0 += load(a + i) * load(b + i);
  double sum = stdx::reduce(acc0 + acc1);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const V va = alpha;
  std::size_t i = 0;
  for (; i + kW <= n; i += kW) store(load(y + i) + va * load(x + i), y + i);
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  V best = 0.0;
  bool nan_seen = false;
  std::size_t i = 0;
  for (; i + kW <= n; i += kW) {
    const V d = stdx::abs(load(a + i) - load(b + i));
    nan_seen = nan_seen || stdx::any_of(stdx::isnan(d));
    best = stdx::max(best, d);
  }
  if (nan_seen) return std::numeric_limits<double>::quiet_NaN();
  double result = stdx::hmax(best);
  for (; i < n; ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (std::isnan(d)) return std::numeric_limits<double>::quiet_NaN();
    result = std::fmax(result, d);
  }
  return result;
}

inline V poly2(const V& z, double c0, double c1, double c2) {
  return (c0 * z + c1) * z + c2;
}

// Same rational approximations as the AVX2 variant.
inline V tanhv(const V& x) {
  const V ax = stdx::abs(x);
  const V z = x * x;
  const V p = poly2(z, kTanhP0, kTanhP1, kTanhP2);
  const V q = ((z + kTanhQ0) * z + kTanhQ1) * z + kTanhQ2;
  const V small = x + x * z * (p / q);

  const V t = 2.0 * stdx::min(ax, V(kTanhClamp));
  const V n = stdx::floor(t * kLog2e + 0.5);
  V r = t - n * kLn2Hi;
  r = r - n * kLn2Lo;
  const V rr = r * r;
  const V px = r * poly2(rr, kExpP0, kExpP1, kExpP2);
  const V qx = poly2(rr, kExpQ0, kExpQ1, kExpQ2) * rr + kExpQ3;
  const V er = 1.0 + 2.0 * (px / (qx - px));
  const V e = stdx::ldexp(
      er, stdx::static_simd_cast<stdx::fixed_size_simd<int, kW>>(n));
  V large = 1.0 - 2.0 / (e + 1.0);
  large = stdx::copysign(large, x);

  V result = large;
  stdx::where(ax < kTanhSmall, result) = small;
  stdx::where(stdx::isnan(x), result) = x;
  return result;
}

void add_tanh(const double* bias, const double* pre, double* out,
              std::size_t n) {
  std::size_t i = 0;
  for (; i + kW <= n; i += kW) store(tanhv(load(bias + i) + load(pre + i)), out + i);
  if (i < n) {
    double tail[kW] = {};
    for (std::size_t j = i; j < n; ++j) tail[j - i] = bias[j] + pre[j];
    store(tanhv(load(tail)), tail);
    for (std::size_t j = i; j < n; ++j) out[j] = tail[j - i];
  }
}

bool all_finite(const double* a, std::size_t n) {
  std::size_t i = 0;
  for (; i + kW <= n; i += kW) {
    if (!stdx::all_of(stdx::isfinite(load(a + i)))) return false;
  }
  for (; i < n; ++i) {
    if (!std::isfinite(a[i])) return false;
  }
  return true;
}

}  // namespace

const KernelTable* portable_simd_table() {
  static const KernelTable kTable{dot, axpy, max_abs_diff, add_tanh,
                                  all_finite};
  return &kTable;
}

}  // namespace gesn::kernels::detail

#else

namespace gesn::kernels::detail {
const KernelTable* portable_simd_table() { return nullptr; }
}  // namespace gesn::kernels::detail

#endif
