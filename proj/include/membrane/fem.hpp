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
#include <variant>
#include <vector>

#include "membrane/geometry.hpp"

namespace membrane {

/// Parameters of the regularized Newton continuation solver.
///
/// The state is the minimizer of
///   E_eps(u) = int (|grad u|^2 + eps^2)^(p/2) / p + |u|^p / p - int_bnd f u
/// with eps driven from epsilon_start down to epsilon_min, warm-starting
/// each stage.
struct SolverConfig {
  double p = 2.0;
  double epsilon_start = 1e-1;
  double epsilon_min = 1e-6;
  double continuation_factor = 10.0;
  double newton_tol = 1e-10;  ///< l2 norm of the energy gradient
  int max_newton = 50;        ///< per continuation stage
  double line_search_beta = 0.5;
  double line_search_c = 1e-4;
  double linear_rtol = 1e-13;  ///< CG relative residual (must be <= 1e-12)
  void validate() const;       // throws ConfigError
};

/// A load f on the boundary loop. Three representations:
///  - per-edge constants (one value per boundary edge),
///  - amplitude * indicator of a BoundaryRegion (which need not align with
///    edges),
///  - nodal trace values (piecewise linear, one value per boundary vertex).
class BoundaryLoad {
 public:
  struct PerEdge {
    std::vector<double> values;
  };
  struct Indicator {
    BoundaryRegion region;
    double amplitude = 1.0;
  };
  struct NodalTrace {
    std::vector<double> values;
  };

  static BoundaryLoad per_edge(std::vector<double> values);
  static BoundaryLoad indicator(BoundaryRegion region, double amplitude = 1.0);
  static BoundaryLoad nodal_trace(std::vector<double> values);

  enum class Kind { PerEdge, Indicator, NodalTrace };
  Kind kind() const;

  const PerEdge& as_per_edge() const { return std::get<PerEdge>(payload_); }
  const Indicator& as_indicator() const { return std::get<Indicator>(payload_); }
  const NodalTrace& as_nodal() const { return std::get<NodalTrace>(payload_); }

  /// The load lambda * f.
  BoundaryLoad scaled(double lambda) const;

  /// Value of f at arc length s (jumps of indicators evaluated as the
  /// right-sided limit, consistent with half-open intervals).
  double value_at(const Mesh& mesh, double s) const;

 private:
  std::variant<PerEdge, Indicator, NodalTrace> payload_;
};

/// Load that is identically c, as per-edge constants.
BoundaryLoad make_constant_load(const Mesh& mesh, double c);

struct StateSolution {
  std::vector<double> nodal_u;  ///< one value per mesh vertex
  double p_used = 2.0;
  double epsilon_final = 0.0;
  bool converged = false;
  double residual_norm = 0.0;  ///< gradient norm at epsilon_final
  int newton_iterations = 0;   ///< total accepted steps over all stages
  double energy_value = 0.0;   ///< unregularized int |grad u|^p + |u|^p
  /// E_eps after each accepted Newton step (line-search diagnostics; resets
  /// are not recorded across stages since eps changes the objective).
  std::vector<std::vector<double>> stage_energies;
};

/// Exact load vector: entry i is int_bnd f * (hat function of vertex i) ds.
/// Per-edge constants and nodal traces integrate in closed form; indicator
/// loads integrate over the exact sub-interval overlap of every edge.
std::vector<double> assemble_load(const Mesh& mesh, const BoundaryLoad& load);

/// Solves the regularized state equation. Returns converged = false when
/// Newton stalls at epsilon_min (caller decides); throws SolveError when a
/// linear solve fails.
StateSolution solve_state(const Mesh& mesh, const BoundaryLoad& load,
                          const SolverConfig& config,
                          std::span<const double> initial_guess = {});

/// int |grad u|^p + |u|^p with the assembly quadratures (exact per-element
/// gradients, vertex-lumped |u|^p). No epsilon.
double energy(const Mesh& mesh, std::span<const double> u, double p);
double energy(const Mesh& mesh, const StateSolution& state);

/// J = int_bnd f u ds, with the same exact boundary integration as
/// assemble_load (equals load-vector . nodal_u).
double cost_J(const Mesh& mesh, const BoundaryLoad& load,
              const StateSolution& state);
double cost_J(const Mesh& mesh, const BoundaryLoad& load,
              std::span<const double> u);

/// I(v) = (p int_bnd f v - energy(v)) / (p - 1); maximized by the state.
double functional_I(const Mesh& mesh, const BoundaryLoad& load,
                    std::span<const double> v, double p);

/// Lumped boundary weights: half the summed lengths of the two edges
/// adjacent to each boundary vertex (trapezoid rule weights), loop order.
std::vector<double> boundary_lumped_weights(const Mesh& mesh);

}  // namespace membrane
