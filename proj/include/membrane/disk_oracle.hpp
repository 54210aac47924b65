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

#include <cstdint>
#include <string>
#include <vector>

#include "membrane/geometry.hpp"

// Semi-analytic ground truth for p = 2 on the unit disk. The Neumann
// problem -Lap u + u = 0, du/dn = f separates into Fourier modes with
// radial parts I_n(r) (modified Bessel functions), giving closed forms for
// the boundary trace and the cost J.

namespace membrane::oracle {

/// Modified Bessel function of the first kind by power series
/// (converges fast for r <= 10). Terms are summed until
/// term < 1e-16 * partial sum.
double bessel_I(int n, double r);

/// I_n'(1): (I_{n-1}(1) + I_{n+1}(1)) / 2 for n >= 1, and I_0' = I_1.
double bessel_I_prime_at_1(int n);

/// f(theta) = a0 + sum_n a_n cos(n theta) + b_n sin(n theta).
struct FourierLoad {
  double a0 = 0.0;
  std::vector<double> a;  // a[k] multiplies cos((k+1) theta)
  std::vector<double> b;  // b[k] multiplies sin((k+1) theta)
  int n_modes() const { return static_cast<int>(a.size()); }
  double value(double theta) const;
};

struct OracleSolution {
  /// boundary trace coefficients: u(1,theta) = u0 + sum u_cos[k] cos(...)
  double u0 = 0.0;
  std::vector<double> u_cos;
  std::vector<double> u_sin;
  double j_value = 0.0;
  double truncation_bound = 0.0;  ///< crude bound used for indicator loads
  double trace(double theta) const;
};

/// Mode-wise solve: the boundary trace multiplier of mode n is
/// I_n(1) / I_n'(1), and
/// J = 2 pi a0^2 I_0/I_0' + pi sum (a_n^2 + b_n^2) I_n/I_n'.
OracleSolution solve_disk(const FourierLoad& load);

/// Exact Fourier coefficients of the indicator of a region on the unit
/// circle: per interval [alpha, beta],
///   a0 += (beta - alpha) / (2 pi),
///   a_n += (sin(n beta) - sin(n alpha)) / (n pi),
///   b_n += (cos(n alpha) - cos(n beta)) / (n pi).
FourierLoad arc_fourier(const BoundaryRegion& region, int n_modes);

/// J for the indicator of a region (p = 2, unit disk).
double indicator_J(const BoundaryRegion& region, int n_modes = 64);

struct ArcConfig {
  std::string description;
  BoundaryRegion region;
  double j_value = 0.0;
};

struct ArcSearchResult {
  std::vector<ArcConfig> table;  // entry 0 is the single arc
  int best_index = 0;
};

/// Evaluates J for the single arc of measure A and for `k_configs`
/// well-separated random two-arc splits of the same total measure.
/// Deterministic for a fixed seed.
ArcSearchResult best_arc_search(double measure, int k_configs,
                                std::uint64_t seed = 1);

}  // namespace membrane::oracle
