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

#ifndef GESN_SRC_KERNELS_TABLES_HPP_
#define GESN_SRC_KERNELS_TABLES_HPP_

#include "gesn/kernels.hpp"

namespace gesn::kernels::detail {

const KernelTable& scalar_table();
// nullptr when the variant is not compiled into this binary.
const KernelTable* avx2_table();
const KernelTable* portable_simd_table();

// Coefficients of the rational tanh / exp approximations used by the
// vectorized variants (Cephes tanh.c / exp.c, double precision).
inline constexpr double kTanhSmall = 0.625;
inline constexpr double kTanhClamp = 22.0;  // tanh rounds to +-1 beyond ~19.1
inline constexpr double kTanhP0 = -9.64399179425052238628E-1;
inline constexpr double kTanhP1 = -9.92877231001918586564E1;
inline constexpr double kTanhP2 = -1.61468768441708447952E3;
inline constexpr double kTanhQ0 = 1.12811678491632931402E2;
inline constexpr double kTanhQ1 = 2.23548839060100448583E3;
inline constexpr double kTanhQ2 = 4.84406305325125486048E3;

inline constexpr double kExpP0 = 1.26177193074810590878E-4;
inline constexpr double kExpP1 = 3.02994407707441961300E-2;
inline constexpr double kExpP2 = 9.99999999999999999910E-1;
inline constexpr double kExpQ0 = 3.00198505138664455042E-6;
inline constexpr double kExpQ1 = 2.52448340349684104192E-3;
inline constexpr double kExpQ2 = 2.27265548208155028766E-1;
inline constexpr double kExpQ3 = 2.00000000000000000009E0;
inline constexpr double kLog2e = 1.4426950408889634073599;
inline constexpr double kLn2Hi = 6.93145751953125E-1;
inline constexpr double kLn2Lo = 1.42860682030941723212E-6;

}  // namespace gesn::kernels::detail

#endif  // GESN_SRC_KERNELS_TABLES_HPP_
