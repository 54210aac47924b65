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

#pragma once

#include <cstddef>
#include <span>

// Dense vector and CSR sparse kernels used by the inner loops of the
// nonlinear solver. Every kernel has a scalar reference implementation;
// on x86-64 an AVX2+FMA variant is selected at runtime when the host
// supports it. The two variants are equivalence-tested against each other.

namespace membrane::kernels {

enum class Backend { Scalar, Avx2 };

/// True if this binary and host can run the AVX2 variants.
bool avx2_available();

/// Backend currently used by the dispatched entry points.
Backend active_backend();

/// Force a backend (useful for tests). Throws std::runtime_error if the
/// requested backend is unavailable on this host.
void set_backend(Backend backend);

/// Reset to the auto-detected backend.
void reset_backend();

// Dispatched entry points.
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);  // y += a*x
void aypx(double a, std::span<const double> x, std::span<double> y);  // y  = x + a*y
void hadamard(std::span<const double> x, std::span<const double> y,
              std::span<double> out);  // out = x .* y
void csr_spmv(std::size_t n_rows, const int* row_ptr, const int* cols,
              const double* vals, const double* x, double* y);

// Scalar reference implementations (always available; the oracle side of
// the equivalence tests).
namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void aypx(double a, std::span<const double> x, std::span<double> y);
void hadamard(std::span<const double> x, std::span<const double> y,
              std::span<double> out);
void csr_spmv(std::size_t n_rows, const int* row_ptr, const int* cols,
              const double* vals, const double* x, double* y);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void aypx(double a, std::span<const double> x, std::span<double> y);
void hadamard(std::span<const double> x, std::span<const double> y,
              std::span<double> out);
void csr_spmv(std::size_t n_rows, const int* row_ptr, const int* cols,
              const double* vals, const double* x, double* y);
}  // namespace avx2
#endif

}  // namespace membrane::kernels
