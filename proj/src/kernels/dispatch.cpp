// Copyright 2026 The ddc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <string>

#include "ddc/kernels.hpp"

namespace ddc::kernels {
namespace {

Isa DetectIsa() {
  if (const char* env = std::getenv("DDC_SIMD")) {
    if (std::string(env) == "scalar") return Isa::kScalar;
  }
  return cpu_supports_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& Selected() {
  static std::atomic<Isa> isa{DetectIsa()};
  return isa;
}

}  // namespace

bool cpu_supports_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return avx2::compiled() && __builtin_cpu_supports("avx2") &&
         __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return Selected().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::kAvx2 && !cpu_supports_avx2()) isa = Isa::kScalar;
  Selected().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

const KernelTable& table_for(Isa isa) {
  if (isa == Isa::kAvx2 && cpu_supports_avx2()) return avx2::table();
  return scalar::table();
}

double dot(std::span<const double> a, std::span<const double> b) {
  return table_for(active_isa()).dot(a.data(), b.data(), a.size());
}

void cross_dots(std::span<const double> lhs, std::size_t lhs_count,
                std::span<const double> rhs, std::size_t rhs_count,
                std::size_t len, std::span<double> out) {
  table_for(active_isa())
      .cross_dots(lhs.data(), lhs_count, rhs.data(), rhs_count, len, out.data());
}

void sign_project(std::complex<double> lambda, std::span<const double> re,
                  std::span<const double> im, double eps,
                  std::span<double> out) {
  table_for(active_isa())
      .sign_project(lambda.real(), lambda.imag(), re.data(), im.data(),
                    re.size(), eps, out.data());
}

double max_abs(std::span<const double> a) {
  return table_for(active_isa()).max_abs(a.data(), a.size());
}

}  // namespace ddc::kernels
