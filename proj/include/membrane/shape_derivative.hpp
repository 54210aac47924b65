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

#include <vector>

#include "membrane/fem.hpp"
#include "membrane/geometry.hpp"

// First variation of J(chi_D) under tangential transport of the region's
// endpoints. In 2-D a boundary-tangential flow restricted to the boundary
// loop is pure arc-length transport, so both the cost derivative and the
// measure derivative reduce to sums over the region's endpoints:
//   dJ/dt = p/(p-1) * sum_i u0(s_i) sigma_i V_i,   dA/dt = sum_i sigma_i V_i.

namespace membrane {

/// Tangential endpoint speeds, indexed to match region.endpoints() (which
/// lists endpoints in increasing arc-length order).
struct TangentialVelocity {
  std::vector<double> speeds;
};

/// Endpoint transport s_i -> s_i + t V_i, renormalized modulo the
/// perimeter. Throws PerturbationTooLarge when an interval or a gap would
/// close or invert.
BoundaryRegion perturb_region(const BoundaryRegion& region,
                              const TangentialVelocity& velocity, double t);

/// Endpoint formula for dJ/dt at t = 0; u0 is the state for the load
/// chi_region, with its trace interpolated linearly at the endpoints.
double shape_derivative_J(const Mesh& mesh, const StateSolution& u0,
                          const BoundaryRegion& region,
                          const TangentialVelocity& velocity, double p);

/// Endpoint formula for d|D_t|/dt: sum_i sigma_i V_i (exactly linear in t
/// until endpoints cross).
double area_derivative(const BoundaryRegion& region,
                       const TangentialVelocity& velocity);

struct DerivativeEntry {
  double t = 0.0;
  double j_plus = 0.0;
  double j_minus = 0.0;
  double fd_dj = 0.0;
  double fd_da = 0.0;
  bool solver_ok = true;
};

struct DerivativeReport {
  double formula_dj = 0.0;
  double formula_da = 0.0;
  double j_zero = 0.0;  ///< J at t = 0 (continuity checks)
  std::vector<DerivativeEntry> entries;  ///< one per step size, decreasing
  /// regression slope of log |fd_dj - formula_dj| against log t over the
  /// entries with a difference above noise level; 0 when fewer than two
  /// such entries exist (see order_meaningful)
  double observed_order = 0.0;
  bool order_meaningful = false;
};

/// Central finite differences of J and of the measure on the same mesh
/// (indicator loads integrate exactly against sub-edges, so no remeshing
/// is involved). Step sizes must be positive and strictly decreasing.
DerivativeReport fd_check(const Mesh& mesh, const BoundaryRegion& region,
                          const TangentialVelocity& velocity, double p,
                          const SolverConfig& solver,
                          std::span<const double> step_sizes);

}  // namespace membrane
