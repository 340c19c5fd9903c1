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

#include <cmath>

#include "ddc/kernels.hpp"

namespace ddc::kernels::scalar {
namespace {

double Dot(const double* a, const double* b, std::size_t len) {
  double acc = 0.0;
  for (std::size_t k = 0; k < len; ++k) acc += a[k] * b[k];
  return acc;
}

void CrossDots(const double* lhs, std::size_t lhs_count, const double* rhs,
               std::size_t rhs_count, std::size_t len, double* out) {
  for (std::size_t i = 0; i < lhs_count; ++i) {
    for (std::size_t j = 0; j < rhs_count; ++j) {
      out[i * rhs_count + j] = Dot(lhs + i * len, rhs + j * len, len);
    }
  }
}

void SignProject(double re_l, double im_l, const double* re, const double* im,
                 std::size_t len, double eps, double* out) {
  for (std::size_t k = 0; k < len; ++k) {
    const double v = re_l * re[k] + im_l * im[k];
    out[k] = v > 0.0 ? eps : (v < 0.0 ? -eps : 0.0);
  }
}

double MaxAbs(const double* a, std::size_t len) {
  double m = 0.0;
  for (std::size_t k = 0; k < len; ++k) m = std::fmax(m, std::fabs(a[k]));
  return m;
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{&Dot, &CrossDots, &SignProject, &MaxAbs};
  return t;
}

}  // namespace ddc::kernels::scalar
