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

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "gesn/kernels.hpp"
#include "tables.hpp"

namespace gesn::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa pick_default() {
  if (const char* forced = std::getenv("GESN_SIMD")) {
    const std::string name(forced);
    for (Isa isa : available_isas()) {
      if (isa_name(isa) == name) return isa;
    }
    throw std::invalid_argument("GESN_SIMD=" + name +
                                " is not available on this CPU/build");
  }
  const auto isas = available_isas();
  return isas.back();
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kPortableSimd:
      return "simd";
  }
  return "unknown";
}

// Ordered narrowest to widest preference.
std::vector<Isa> available_isas() {
  std::vector<Isa> isas{Isa::kScalar};
  if (detail::portable_simd_table() != nullptr) {
    isas.push_back(Isa::kPortableSimd);
  }
  if (detail::avx2_table() != nullptr && cpu_has_avx2()) {
    isas.push_back(Isa::kAvx2);
  }
  return isas;
}

const KernelTable& table(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return detail::scalar_table();
    case Isa::kAvx2:
      if (detail::avx2_table() != nullptr && cpu_has_avx2()) {
        return *detail::avx2_table();
      }
      break;
    case Isa::kPortableSimd:
      if (detail::portable_simd_table() != nullptr) {
        return *detail::portable_simd_table();
      }
      break;
  }
  throw std::invalid_argument("kernel variant '" + std::string(isa_name(isa)) +
                              "' is not available");
}

Isa active_isa() {
  static const Isa kIsa = pick_default();
  return kIsa;
}

const KernelTable& active() {
  static const KernelTable& kTable = table(active_isa());
  return kTable;
}

}  // namespace gesn::kernels
