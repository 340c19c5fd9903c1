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

#pragma once

// Data-parallel inner loops used by the SDP solver and the attack code.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2+FMA variant compiled in its own translation unit. The variant is
// picked once at startup from CPUID; `DDC_SIMD=scalar` in the environment
// forces the reference path. Results of the two paths agree to rounding
// (summation order differs), and are bit-stable for a fixed path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace ddc::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t len);
  // out[i * rhs_count + j] = dot(lhs + i * len, rhs + j * len)
  void (*cross_dots)(const double* lhs, std::size_t lhs_count,
                     const double* rhs, std::size_t rhs_count, std::size_t len,
                     double* out);
  // out[k] = eps * sign(re_l * re[k] + im_l * im[k]), sign(0) = 0
  void (*sign_project)(double re_l, double im_l, const double* re,
                       const double* im, std::size_t len, double eps,
                       double* out);
  double (*max_abs)(const double* a, std::size_t len);
};

namespace scalar {
const KernelTable& table();
}
namespace avx2 {
// Only valid to call through when cpu_supports_avx2() is true.
const KernelTable& table();
bool compiled();
}  // namespace avx2

bool cpu_supports_avx2();

/// Currently selected instruction set.
Isa active_isa();
/// Overrides the selection; falls back to scalar if AVX2 is unavailable.
void set_isa(Isa isa);
std::string_view isa_name(Isa isa);
const KernelTable& table_for(Isa isa);

// Convenience wrappers over the active table.
double dot(std::span<const double> a, std::span<const double> b);
void cross_dots(std::span<const double> lhs, std::size_t lhs_count,
                std::span<const double> rhs, std::size_t rhs_count,
                std::size_t len, std::span<double> out);
void sign_project(std::complex<double> lambda, std::span<const double> re,
                  std::span<const double> im, double eps,
                  std::span<double> out);
double max_abs(std::span<const double> a);

}  // namespace ddc::kernels
