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

// AVX2 + FMA kernels. Compiled with -mavx2 -mfma; only reached after the
// dispatcher has confirmed CPU support.

#include "tables.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace gesn::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8),
                           _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12),
                           _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double sum = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1),
                                  _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4),
                                     _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d best = _mm256_setzero_pd();
  __m256d nan_seen = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_andnot_pd(
        sign, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    nan_seen = _mm256_or_pd(nan_seen, _mm256_cmp_pd(d, d, _CMP_UNORD_Q));
    best = _mm256_max_pd(best, d);
  }
  if (_mm256_movemask_pd(nan_seen) != 0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double result = std::fmax(std::fmax(lanes[0], lanes[1]),
                            std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (std::isnan(d)) return std::numeric_limits<double>::quiet_NaN();
    result = std::fmax(result, d);
  }
  return result;
}

inline __m256d poly2(__m256d z, double c0, double c1, double c2) {
  return _mm256_fmadd_pd(
      _mm256_fmadd_pd(_mm256_set1_pd(c0), z, _mm256_set1_pd(c1)), z,
      _mm256_set1_pd(c2));
}

// tanh(x) for a vector of doubles, ~1 ulp from the libm result.
inline __m256d tanh4(__m256d x) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d ax = _mm256_andnot_pd(sign_mask, x);

  // |x| < 0.625: x + x^3 P(x^2) / Q(x^2)
  const __m256d z = _mm256_mul_pd(x, x);
  const __m256d p = poly2(z, kTanhP0, kTanhP1, kTanhP2);
  const __m256d q = _mm256_fmadd_pd(
      _mm256_fmadd_pd(_mm256_add_pd(z, _mm256_set1_pd(kTanhQ0)), z,
                      _mm256_set1_pd(kTanhQ1)),
      z, _mm256_set1_pd(kTanhQ2));
  const __m256d small =
      _mm256_fmadd_pd(_mm256_mul_pd(x, z), _mm256_div_pd(p, q), x);

  // otherwise: 1 - 2 / (exp(2|x|) + 1), exp by range reduction to
  // r in [-ln2/2, ln2/2] and a Pade form for exp(r).
  const __m256d t =
      _mm256_mul_pd(two, _mm256_min_pd(ax, _mm256_set1_pd(kTanhClamp)));
  const __m256d n = _mm256_floor_pd(
      _mm256_fmadd_pd(t, _mm256_set1_pd(kLog2e), _mm256_set1_pd(0.5)));
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Hi), t);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Lo), r);
  const __m256d rr = _mm256_mul_pd(r, r);
  const __m256d px = _mm256_mul_pd(r, poly2(rr, kExpP0, kExpP1, kExpP2));
  const __m256d qx = _mm256_fmadd_pd(poly2(rr, kExpQ0, kExpQ1, kExpQ2), rr,
                                     _mm256_set1_pd(kExpQ3));
  const __m256d er = _mm256_fmadd_pd(
      two, _mm256_div_pd(px, _mm256_sub_pd(qx, px)), one);
  const __m256i n64 = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
  const __m256d scale = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52));
  const __m256d e = _mm256_mul_pd(er, scale);
  __m256d large = _mm256_sub_pd(one, _mm256_div_pd(two, _mm256_add_pd(e, one)));
  large = _mm256_or_pd(large, _mm256_and_pd(sign_mask, x));

  __m256d result = _mm256_blendv_pd(
      large, small, _mm256_cmp_pd(ax, _mm256_set1_pd(kTanhSmall), _CMP_LT_OQ));
  // NaN in, NaN out (the clamp above would otherwise swallow it)
  return _mm256_blendv_pd(result, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
}

void add_tanh(const double* bias, const double* pre, double* out,
              std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, tanh4(_mm256_add_pd(_mm256_loadu_pd(bias + i),
                                                  _mm256_loadu_pd(pre + i))));
  }
  if (i < n) {
    alignas(32) double tail[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = i; j < n; ++j) tail[j - i] = bias[j] + pre[j];
    _mm256_store_pd(tail, tanh4(_mm256_load_pd(tail)));
    for (std::size_t j = i; j < n; ++j) out[j] = tail[j - i];
  }
}

bool all_finite(const double* a, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d bad = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_mul_pd(_mm256_loadu_pd(a + i), zero);
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(v, zero, _CMP_NEQ_UQ));
  }
  if (_mm256_movemask_pd(bad) != 0) return false;
  for (; i < n; ++i) {
    if (!std::isfinite(a[i])) return false;
  }
  return true;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable kTable{dot, axpy, max_abs_diff, add_tanh,
                                  all_finite};
  return &kTable;
}

}  // namespace gesn::kernels::detail

#else

namespace gesn::kernels::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace gesn::kernels::detail

#endif
