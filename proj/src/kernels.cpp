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

#include "membrane/kernels.hpp"

#include <cassert>
#include <stdexcept>

namespace membrane::kernels {

namespace scalar {

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void aypx(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + a * y[i];
}

void hadamard(std::span<const double> x, std::span<const double> y,
              std::span<double> out) {
  assert(x.size() == y.size() && x.size() == out.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
}

void csr_spmv(std::size_t n_rows, const int* row_ptr, const int* cols,
              const double* vals, const double* x, double* y) {
  for (std::size_t r = 0; r < n_rows; ++r) {
    double acc = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += vals[k] * x[cols[k]];
    y[r] = acc;
  }
}

}  // namespace scalar

namespace {

Backend detect_backend() {
  return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

Backend& backend_slot() {
  static Backend current = detect_backend();
  return current;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() { return backend_slot(); }

void set_backend(Backend backend) {
  if (backend == Backend::Avx2 && !avx2_available())
    throw std::runtime_error("AVX2 backend not available on this host");
  backend_slot() = backend;
}

void reset_backend() { backend_slot() = detect_backend(); }

#if defined(__x86_64__) || defined(_M_X64)
#define MEMBRANE_DISPATCH(fn, ...)                    \
  do {                                                \
    if (backend_slot() == Backend::Avx2)              \
      return avx2::fn(__VA_ARGS__);                   \
    return scalar::fn(__VA_ARGS__);                   \
  } while (0)
#else
#define MEMBRANE_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(std::span<const double> x, std::span<const double> y) {
  MEMBRANE_DISPATCH(dot, x, y);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  MEMBRANE_DISPATCH(axpy, a, x, y);
}

void aypx(double a, std::span<const double> x, std::span<double> y) {
  MEMBRANE_DISPATCH(aypx, a, x, y);
}

void hadamard(std::span<const double> x, std::span<const double> y,
              std::span<double> out) {
  MEMBRANE_DISPATCH(hadamard, x, y, out);
}

void csr_spmv(std::size_t n_rows, const int* row_ptr, const int* cols,
              const double* vals, const double* x, double* y) {
  MEMBRANE_DISPATCH(csr_spmv, n_rows, row_ptr, cols, vals, x, y);
}

#undef MEMBRANE_DISPATCH

}  // namespace membrane::kernels
