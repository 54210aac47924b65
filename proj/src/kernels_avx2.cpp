// Copyright 2026 The membrane authors.
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

// AVX2+FMA kernel variants. Compiled with per-function target attributes so
// the rest of the binary keeps the baseline ISA; callers must check
// avx2_available() before dispatching here.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cassert>

#include "membrane/kernels.hpp"

#define MEMBRANE_AVX2 __attribute__((target("avx2,fma")))

namespace membrane::kernels::avx2 {

namespace {

MEMBRANE_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

MEMBRANE_AVX2
double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i]), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i + 4]), _mm256_loadu_pd(&y[i + 4]), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i]), acc0);
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

MEMBRANE_AVX2
void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i]));
    _mm256_storeu_pd(&y[i], r);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

MEMBRANE_AVX2
void aypx(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(&y[i]), _mm256_loadu_pd(&x[i]));
    _mm256_storeu_pd(&y[i], r);
  }
  for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

MEMBRANE_AVX2
void hadamard(std::span<const double> x, std::span<const double> y,
              std::span<double> out) {
  assert(x.size() == y.size() && x.size() == out.size());
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(&out[i],
                     _mm256_mul_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i])));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

MEMBRANE_AVX2
void csr_spmv(std::size_t n_rows, const int* row_ptr, const int* cols,
              const double* vals, const double* x, double* y) {
  for (std::size_t r = 0; r < n_rows; ++r) {
    const int begin = row_ptr[r];
    const int end = row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    int k = begin;
    for (; k + 4 <= end; k += 4) {
      __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(&cols[k]));
      __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(&vals[k]), xv, acc);
    }
    double s = hsum(acc);
    for (; k < end; ++k) s += vals[k] * x[cols[k]];
    y[r] = s;
  }
}

}  // namespace membrane::kernels::avx2

#endif  // x86-64
