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

#include "membrane/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "membrane/errors.hpp"
#include "membrane/kernels.hpp"

namespace membrane {

CsrMatrix CsrMatrix::from_triplets(int n, std::span<const int> rows,
                                   std::span<const int> cols,
                                   std::span<const double> vals) {
  if (rows.size() != cols.size() || rows.size() != vals.size())
    throw std::invalid_argument("triplet arrays must have equal length");
  CsrMatrix m;
  m.n_ = n;

  // bucket by row, then sort each row segment by column and fold duplicates
  std::vector<int> count(n + 1, 0);
  for (int r : rows) {
    if (r < 0 || r >= n) throw std::invalid_argument("triplet row out of range");
    ++count[r + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<int> order(rows.size());
  {
    std::vector<int> cursor(count.begin(), count.end() - 1);
    for (std::size_t k = 0; k < rows.size(); ++k) order[cursor[rows[k]]++] = static_cast<int>(k);
  }
  m.row_ptr_.assign(n + 1, 0);
  m.col_idx_.reserve(rows.size());
  m.vals_.reserve(rows.size());
  for (int r = 0; r < n; ++r) {
    const int begin = count[r];
    const int end = count[r + 1];
    std::sort(order.begin() + begin, order.begin() + end,
              [&](int p, int q) { return cols[p] < cols[q]; });
    int last_col = -1;
    for (int k = begin; k < end; ++k) {
      const int c = cols[order[k]];
      if (c < 0 || c >= n) throw std::invalid_argument("triplet col out of range");
      if (c == last_col) {
        m.vals_.back() += vals[order[k]];
      } else {
        m.col_idx_.push_back(c);
        m.vals_.push_back(vals[order[k]]);
        last_col = c;
      }
    }
    m.row_ptr_[r + 1] = static_cast<int>(m.col_idx_.size());
  }
  return m;
}

void CsrMatrix::mult(std::span<const double> x, std::span<double> y) const {
  kernels::csr_spmv(static_cast<std::size_t>(n_), row_ptr_.data(), col_idx_.data(),
                    vals_.data(), x.data(), y.data());
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (int r = 0; r < n_; ++r) {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] == r) d[r] = vals_[k];
    }
  }
  return d;
}

CgSummary pcg_solve(const CsrMatrix& a, std::span<const double> b,
                    std::span<double> x, double rel_tol, int max_iters) {
  const int n = a.size();
  const double bnorm = std::sqrt(kernels::dot(b, b));
  CgSummary summary;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    summary.converged = true;
    return summary;
  }

  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw SolveError("matrix has a non-positive diagonal entry");
    d = 1.0 / d;
  }

  std::vector<double> r(n), z(n), p(n), ap(n);
  a.mult(x, r);                                   // r = b - A x
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  kernels::hadamard(inv_diag, r, z);
  std::copy(z.begin(), z.end(), p.begin());
  double rz = kernels::dot(r, z);
  double rnorm = std::sqrt(kernels::dot(r, r));

  const double target = rel_tol * bnorm;
  int it = 0;
  while (rnorm > target && it < max_iters) {
    a.mult(p, ap);
    const double pap = kernels::dot(p, ap);
    if (!(pap > 0.0)) break;  // not SPD (or exact convergence); bail out
    const double alpha = rz / pap;
    kernels::axpy(alpha, p, x);
    kernels::axpy(-alpha, ap, r);
    kernels::hadamard(inv_diag, r, z);
    const double rz_new = kernels::dot(r, z);
    kernels::aypx(rz_new / rz, z, p);
    rz = rz_new;
    rnorm = std::sqrt(kernels::dot(r, r));
    ++it;
  }
  summary.converged = rnorm <= target;
  summary.iterations = it;
  summary.relative_residual = rnorm / bnorm;
  return summary;
}

}  // namespace membrane
