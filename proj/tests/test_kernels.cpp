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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "membrane/kernels.hpp"
#include "membrane/rng.hpp"

using namespace membrane;

namespace {

std::vector<double> random_vector(SplitMix64& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

// Equivalence of the dispatched backends against the scalar reference,
// over sizes that exercise the vector remainders.
TEST_CASE("dot/axpy/aypx/hadamard match the scalar reference") {
  SplitMix64 rng(42);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 33u, 1000u, 1001u}) {
    const std::vector<double> x = random_vector(rng, n);
    const std::vector<double> y = random_vector(rng, n);

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]);
    const double ref_dot = kernels::scalar::dot(x, y);
    CHECK(std::abs(kernels::dot(x, y) - ref_dot) <= 1e-14 * (scale + 1.0));

    std::vector<double> ya = y, yb = y;
    kernels::scalar::axpy(0.7, x, ya);
    kernels::axpy(0.7, x, yb);
    for (std::size_t i = 0; i < n; ++i) CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-15));

    ya = y;
    yb = y;
    kernels::scalar::aypx(-1.3, x, ya);
    kernels::aypx(-1.3, x, yb);
    for (std::size_t i = 0; i < n; ++i) CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-15));

    std::vector<double> oa(n), ob(n);
    kernels::scalar::hadamard(x, y, oa);
    kernels::hadamard(x, y, ob);
    for (std::size_t i = 0; i < n; ++i) CHECK(oa[i] == ob[i]);
  }
}

TEST_CASE("csr_spmv matches the scalar reference") {
  SplitMix64 rng(7);
  const int n = 137;
  std::vector<int> row_ptr{0};
  std::vector<int> cols;
  std::vector<double> vals;
  for (int r = 0; r < n; ++r) {
    const int nnz = static_cast<int>(rng.below(12));
    int c = static_cast<int>(rng.below(5));
    for (int k = 0; k < nnz && c < n; ++k) {
      cols.push_back(c);
      vals.push_back(rng.uniform(-2.0, 2.0));
      c += 1 + static_cast<int>(rng.below(7));
    }
    row_ptr.push_back(static_cast<int>(cols.size()));
  }
  const std::vector<double> x = random_vector(rng, n);
  std::vector<double> ya(n), yb(n);
  kernels::scalar::csr_spmv(n, row_ptr.data(), cols.data(), vals.data(), x.data(),
                            ya.data());
  kernels::csr_spmv(n, row_ptr.data(), cols.data(), vals.data(), x.data(),
                    yb.data());
  for (int i = 0; i < n; ++i)
    CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-14));
}

TEST_CASE("backend selection is explicit and reversible") {
  const kernels::Backend detected = kernels::active_backend();
  kernels::set_backend(kernels::Backend::Scalar);
  CHECK(kernels::active_backend() == kernels::Backend::Scalar);

  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(kernels::dot(x, x) == doctest::Approx(55.0));

  if (kernels::avx2_available()) {
    kernels::set_backend(kernels::Backend::Avx2);
    CHECK(kernels::dot(x, x) == doctest::Approx(55.0));
  } else {
    CHECK_THROWS(kernels::set_backend(kernels::Backend::Avx2));
  }
  kernels::reset_backend();
  CHECK(kernels::active_backend() == detected);
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 variants agree with scalar directly" *
          doctest::skip(!kernels::avx2_available())) {
  SplitMix64 rng(99);
  for (std::size_t n : {5u, 16u, 255u, 256u, 10000u}) {
    const std::vector<double> x = random_vector(rng, n);
    const std::vector<double> y = random_vector(rng, n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]);
    CHECK(std::abs(kernels::avx2::dot(x, y) - kernels::scalar::dot(x, y)) <=
          1e-14 * (scale + 1.0));
  }
}
#endif
