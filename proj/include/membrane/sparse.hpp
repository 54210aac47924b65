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

#include <span>
#include <vector>

#include "membrane/errors.hpp"

namespace membrane {

/// Compressed sparse row matrix (square, double precision).
class CsrMatrix {
 public:
  CsrMatrix() = default;

  /// Builds from COO triplets, summing duplicates.
  static CsrMatrix from_triplets(int n, std::span<const int> rows,
                                 std::span<const int> cols,
                                 std::span<const double> vals);

  int size() const { return n_; }
  int nnz() const { return static_cast<int>(vals_.size()); }

  void mult(std::span<const double> x, std::span<double> y) const;
  std::vector<double> diagonal() const;

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return vals_; }

 private:
  int n_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> col_idx_;
  std::vector<double> vals_;
};

struct CgSummary {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients for SPD systems. `x` holds the
/// initial guess on entry and the solution on exit. Converged means
/// ||b - Ax||_2 <= rel_tol * ||b||_2.
CgSummary pcg_solve(const CsrMatrix& a, std::span<const double> b,
                    std::span<double> x, double rel_tol, int max_iters);

}  // namespace membrane
