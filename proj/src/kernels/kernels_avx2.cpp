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

#include "ddc/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#define DDC_HAVE_AVX2 1
#include <immintrin.h>
#else
#define DDC_HAVE_AVX2 0
#endif

#include <cmath>

namespace ddc::kernels::avx2 {

#if DDC_HAVE_AVX2
namespace {

inline double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double Dot(const double* a, const double* b, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= len; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4),
                           _mm256_loadu_pd(b + k + 4), acc1);
  }
  for (; k + 4 <= len; k += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
  }
  double acc = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; k < len; ++k) acc += a[k] * b[k];
  return acc;
}

// Four rhs vectors per pass so each lhs load is reused.
void CrossDots(const double* lhs, std::size_t lhs_count, const double* rhs,
               std::size_t rhs_count, std::size_t len, double* out) {
  for (std::size_t i = 0; i < lhs_count; ++i) {
    const double* a = lhs + i * len;
    std::size_t j = 0;
    for (; j + 4 <= rhs_count; j += 4) {
      const double* b0 = rhs + j * len;
      const double* b1 = b0 + len;
      const double* b2 = b1 + len;
      const double* b3 = b2 + len;
      __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
      __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
      std::size_t k = 0;
      for (; k + 4 <= len; k += 4) {
        const __m256d va = _mm256_loadu_pd(a + k);
        s0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b0 + k), s0);
        s1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b1 + k), s1);
        s2 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b2 + k), s2);
        s3 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b3 + k), s3);
      }
      double r0 = HorizontalSum(s0), r1 = HorizontalSum(s1);
      double r2 = HorizontalSum(s2), r3 = HorizontalSum(s3);
      for (; k < len; ++k) {
        r0 += a[k] * b0[k];
        r1 += a[k] * b1[k];
        r2 += a[k] * b2[k];
        r3 += a[k] * b3[k];
      }
      double* row = out + i * rhs_count + j;
      row[0] = r0;
      row[1] = r1;
      row[2] = r2;
      row[3] = r3;
    }
    for (; j < rhs_count; ++j) {
      out[i * rhs_count + j] = Dot(a, rhs + j * len, len);
    }
  }
}

// Plain mul/add (no FMA) so the projected value, and hence its sign, is
// bit-identical to the scalar path.
void SignProject(double re_l, double im_l, const double* re, const double* im,
                 std::size_t len, double eps, double* out) {
  const __m256d vr = _mm256_set1_pd(re_l);
  const __m256d vi = _mm256_set1_pd(im_l);
  const __m256d pos = _mm256_set1_pd(eps);
  const __m256d neg = _mm256_set1_pd(-eps);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    const __m256d v = _mm256_add_pd(_mm256_mul_pd(vr, _mm256_loadu_pd(re + k)),
                                    _mm256_mul_pd(vi, _mm256_loadu_pd(im + k)));
    const __m256d gt = _mm256_cmp_pd(v, zero, _CMP_GT_OQ);
    const __m256d lt = _mm256_cmp_pd(v, zero, _CMP_LT_OQ);
    const __m256d r = _mm256_or_pd(_mm256_and_pd(gt, pos), _mm256_and_pd(lt, neg));
    _mm256_storeu_pd(out + k, r);
  }
  for (; k < len; ++k) {
    const double v = re_l * re[k] + im_l * im[k];
    out[k] = v > 0.0 ? eps : (v < 0.0 ? -eps : 0.0);
  }
}

double MaxAbs(const double* a, std::size_t len) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d m = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    m = _mm256_max_pd(m, _mm256_and_pd(_mm256_loadu_pd(a + k), mask));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; k < len; ++k) r = std::fmax(r, std::fabs(a[k]));
  return r;
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{&Dot, &CrossDots, &SignProject, &MaxAbs};
  return t;
}
bool compiled() { return true; }

#else

const KernelTable& table() { return scalar::table(); }
bool compiled() { return false; }

#endif

}  // namespace ddc::kernels::avx2
