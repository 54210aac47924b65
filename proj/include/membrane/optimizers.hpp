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
#include <span>
#include <vector>

#include "membrane/fem.hpp"
#include "membrane/geometry.hpp"

// Maximizers of J over the three admissible load classes:
//  - rearrangements of a fixed per-edge profile on a uniform boundary
//    partition (best-response sorting ascent),
//  - the unit ball of L^q (explicit via the trace-constant extremal),
//  - plateau loads 0 <= g <= 1 of fixed boundary mass (superlevel / bathtub
//    fixed-point ascent over indicator regions).

namespace membrane {

/// Output of the bathtub maximization: g = 1 above the threshold, g = c on
/// the threshold level set, g = 0 below.
struct BathtubResult {
  std::vector<double> g;   ///< per cell (or per boundary edge)
  double threshold = 0.0;  ///< the level s
  double tie_fraction = 0.0;  ///< c in [0, 1]
  BoundaryRegion region;   ///< set for the piecewise-linear variant
  bool degenerate = false; ///< trace constant over the whole boundary
};

/// Pairs the k-th largest f0 with the k-th largest u (ties in u broken by
/// lowest index). Output is a permutation of f0_values maximizing
/// sum f_e u_e l_e. Requires a uniform partition and nonnegative inputs.
std::vector<double> best_rearrangement(std::span<const double> f0_values,
                                       std::span<const double> u_trace,
                                       std::span<const double> edge_lengths);

/// Maximizes sum g u l over {0 <= g <= 1, sum g l = A} on discrete cells.
BathtubResult bathtub_discrete(std::span<const double> u_values,
                               std::span<const double> lengths, double measure);

/// Superlevel set {u >= t} of a piecewise-linear boundary trace with
/// measure exactly A; the threshold solves the exact per-edge level-set
/// measure equation. Ties (u constant at the threshold over positive
/// length) are trimmed from the end with the largest arc coordinate.
BathtubResult superlevel_region(const Mesh& mesh,
                                std::span<const double> trace, double measure);

enum class StopReason {
  Tolerance,
  MaxIters,
  FixedPoint,
  Degenerate,
  SolverFailure,  ///< a state solve did not converge; trace kept as-is
};

struct AscentRecord {
  int iter = 0;
  double j_value = 0.0;
  double threshold = 0.0;  ///< superlevel threshold (bathtub class)
  double measure = 0.0;    ///< region measure, or sum f l
  double residual = 0.0;   ///< optimality residual / relative J change
};

struct AscentTrace {
  std::vector<AscentRecord> records;
  StopReason reason = StopReason::MaxIters;
};

struct AscentConfig {
  double tol = 1e-10;  ///< relative J change
  int max_iters = 50;
  int multistart = 20;
  std::uint64_t seed = 1;
};

struct RearrangementOutcome {
  std::vector<double> best_f;  ///< per-edge values
  StateSolution state;
  double j_value = 0.0;
  AscentTrace trace;
};

/// Best-response ascent in the rearrangement class starting from f0 as
/// given: f_{k+1} = best_rearrangement(f0, edge means of trace of u_k).
RearrangementOutcome ascent_rearrangement(const Mesh& mesh,
                                          std::span<const double> f0,
                                          const SolverConfig& solver,
                                          const AscentConfig& ascent);

struct BathtubOutcome {
  BoundaryRegion region;
  StateSolution state;
  double j_value = 0.0;
  AscentTrace trace;
};

/// Fixed-point ascent D_{k+1} = superlevel of the trace of u_{D_k}.
BathtubOutcome ascent_bathtub(const Mesh& mesh, double measure,
                              const SolverConfig& solver,
                              const AscentConfig& ascent,
                              const BoundaryRegion& init);

struct MultistartOutcome {
  std::vector<BathtubOutcome> runs;
  int best = 0;
};

/// Multistart driver: run 0 starts from the arc at s = 0, run 1 from the
/// antipodal arc, then alternating random single-arc and two-arc starts.
/// Deterministic for a fixed seed; best J wins.
MultistartOutcome optimize_linfty(const Mesh& mesh, double measure,
                                  const SolverConfig& solver,
                                  const AscentConfig& ascent);

struct RearrangementMultistart {
  std::vector<RearrangementOutcome> runs;
  int best = 0;
};

/// Run 0 starts from f0 as given, later runs from random permutations.
RearrangementMultistart optimize_rearrangement(const Mesh& mesh,
                                               std::span<const double> f0,
                                               const SolverConfig& solver,
                                               const AscentConfig& ascent);

/// Discrete Sobolev-trace extremal: minimizes
///   (int |grad v|^p + |v|^p) / (int_bnd |v|^q')^(p/q')
/// with the boundary norm evaluated by the lumped (trapezoid) rule.
struct LqExtremal {
  std::vector<double> v;  ///< nodal field, nonnegative, boundary q'-norm 1
  double s_value = 0.0;   ///< converged quotient
  double q = 2.0;
  double q_conj = 2.0;
  int iterations = 0;
  bool converged = false;
};

/// Projected gradient descent (Barzilai-Borwein step, backtracking on the
/// quotient, nonnegativity via absolute value, renormalization each
/// iterate). Throws SolveError when the iteration cap is hit.
LqExtremal trace_extremal(const Mesh& mesh, double q, double p,
                          const SolverConfig& solver, int max_iters = 50000);

/// Independent cross-check for p = 2, q' = 2: inverse power iteration on
/// the linear Steklov-type problem (stiffness+mass vs lumped boundary
/// mass). Returns the smallest eigenvalue = discrete S.
double steklov_linear_S(const Mesh& mesh, double tol = 1e-12,
                        int max_iters = 500);

struct LqLoadInfo {
  BoundaryLoad load;             ///< nodal trace f = v^(q'-1)
  double predicted_j = 0.0;      ///< S^(-1/(p-1))
  double predicted_u_scale = 0.0;
  double load_q_norm = 1.0;      ///< discrete lumped q-norm of the load
};

/// Optimal load of the L^q unit ball from a converged extremal.
LqLoadInfo lq_optimal_load(const Mesh& mesh, const LqExtremal& extremal,
                           double p);

struct OptimalityStat {
  double value = 0.0;
  bool no_endpoints = false;  ///< empty or full region: 0 by convention
};

/// max - min of the trace over the region's endpoints (the state of an
/// optimal region is constant there).
OptimalityStat optimality_residual(const Mesh& mesh,
                                   std::span<const double> trace,
                                   const BoundaryRegion& region);
OptimalityStat optimality_residual(const Mesh& mesh, const StateSolution& state,
                                   const BoundaryRegion& region);

}  // namespace membrane
