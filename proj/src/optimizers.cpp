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

#include "membrane/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "membrane/kernels.hpp"
#include "membrane/rng.hpp"
#include "membrane/sparse.hpp"

namespace membrane {

namespace {

void check_nonnegative(std::span<const double> values, const char* what) {
  for (double v : values)
    if (v < 0.0) throw DomainError(std::string(what) + " must be nonnegative");
}

}  // namespace

std::vector<double> best_rearrangement(std::span<const double> f0_values,
                                       std::span<const double> u_trace,
                                       std::span<const double> edge_lengths) {
  const std::size_t n = f0_values.size();
  if (u_trace.size() != n || edge_lengths.size() != n)
    throw DomainError("best_rearrangement inputs must have equal length");
  if (n == 0) return {};
  double mean_len = 0.0;
  for (double l : edge_lengths) mean_len += l;
  mean_len /= static_cast<double>(n);
  for (double l : edge_lengths) {
    if (std::abs(l - mean_len) > 1e-9 * mean_len)
      throw ClassViolationError(
          "rearrangement class requires a uniform boundary partition");
  }
  check_nonnegative(f0_values, "f0");
  check_nonnegative(u_trace, "u trace");

  std::vector<int> by_u(n);
  std::iota(by_u.begin(), by_u.end(), 0);
  std::sort(by_u.begin(), by_u.end(), [&](int i, int j) {
    if (u_trace[i] != u_trace[j]) return u_trace[i] > u_trace[j];
    return i < j;  // ties by lowest edge index
  });
  std::vector<double> sorted_f0(f0_values.begin(), f0_values.end());
  std::sort(sorted_f0.begin(), sorted_f0.end(), std::greater<>());

  std::vector<double> result(n);
  for (std::size_t k = 0; k < n; ++k) result[by_u[k]] = sorted_f0[k];
  return result;
}

BathtubResult bathtub_discrete(std::span<const double> u_values,
                               std::span<const double> lengths, double measure) {
  const std::size_t n = u_values.size();
  if (lengths.size() != n)
    throw DomainError("bathtub_discrete inputs must have equal length");
  double total = 0.0;
  for (double l : lengths) {
    if (!(l > 0.0)) throw DomainError("cell lengths must be positive");
    total += l;
  }
  if (measure < 0.0 || measure > total * (1.0 + 1e-12))
    throw DomainError("bathtub measure outside [0, total length]");

  BathtubResult result;
  result.g.assign(n, 0.0);
  if (n == 0) return result;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return u_values[i] > u_values[j]; });

  // walk distinct values in descending order; s is the first level whose
  // closed superlevel measure exceeds A
  double cum_before = 0.0;  // measure of {u > current level}
  std::size_t k = 0;
  while (k < n) {
    const double level = u_values[order[k]];
    double group_len = 0.0;
    std::size_t k_end = k;
    while (k_end < n && u_values[order[k_end]] == level) {
      group_len += lengths[order[k_end]];
      ++k_end;
    }
    if (cum_before + group_len > measure) {
      result.threshold = level;
      const double c = (measure - cum_before) / group_len;
      result.tie_fraction = c;
      for (std::size_t j = 0; j < k; ++j) result.g[order[j]] = 1.0;
      for (std::size_t j = k; j < k_end; ++j) result.g[order[j]] = c;
      return result;
    }
    cum_before += group_len;
    k = k_end;
  }
  // A >= total: everything filled
  result.threshold = u_values[order[n - 1]];
  result.tie_fraction = 1.0;
  std::fill(result.g.begin(), result.g.end(), 1.0);
  return result;
}

namespace {

/// measure of {u >= t} for the piecewise-linear closed boundary trace
double superlevel_measure(const Mesh& mesh, std::span<const double> trace,
                          double t) {
  const auto& edges = mesh.boundary_edges();
  const std::size_t nb = edges.size();
  double m = 0.0;
  for (std::size_t k = 0; k < nb; ++k) {
    const double ua = trace[k];
    const double ub = trace[(k + 1) % nb];
    const double len = edges[k].length;
    if (ua >= t && ub >= t) {
      m += len;
    } else if (ua >= t) {  // ub < t
      m += len * (ua - t) / (ua - ub);
    } else if (ub >= t) {  // ua < t
      m += len * (ub - t) / (ub - ua);
    }
  }
  return m;
}

/// pieces of {u >= t} (strict = {u > t}) in arc-length coordinates
std::vector<std::pair<double, double>> superlevel_pieces(
    const Mesh& mesh, std::span<const double> trace, double t, bool strict) {
  const auto& edges = mesh.boundary_edges();
  const std::size_t nb = edges.size();
  std::vector<std::pair<double, double>> pieces;
  for (std::size_t k = 0; k < nb; ++k) {
    const double ua = trace[k];
    const double ub = trace[(k + 1) % nb];
    const double s0 = edges[k].s_begin;
    const double len = edges[k].length;
    const bool a_in = strict ? ua > t : ua >= t;
    const bool b_in = strict ? ub > t : ub >= t;
    if (a_in && b_in) {
      pieces.emplace_back(s0, s0 + len);
    } else if (a_in) {
      pieces.emplace_back(s0, s0 + len * (ua - t) / (ua - ub));
    } else if (b_in) {
      pieces.emplace_back(s0 + len * (t - ua) / (ub - ua), s0 + len);
    }
  }
  return pieces;
}

/// maximal runs of boundary edges on which the trace equals t exactly
std::vector<std::pair<double, double>> tie_arcs(const Mesh& mesh,
                                                std::span<const double> trace,
                                                double t) {
  const auto& edges = mesh.boundary_edges();
  const std::size_t nb = edges.size();
  std::vector<std::pair<double, double>> arcs;
  for (std::size_t k = 0; k < nb; ++k) {
    if (trace[k] == t && trace[(k + 1) % nb] == t) {
      const double s0 = edges[k].s_begin;
      if (!arcs.empty() && arcs.back().second == s0) {
        arcs.back().second = s0 + edges[k].length;
      } else {
        arcs.emplace_back(s0, s0 + edges[k].length);
      }
    }
  }
  return arcs;
}

void fill_edge_fractions(const Mesh& mesh, BathtubResult& result) {
  const auto& edges = mesh.boundary_edges();
  result.g.resize(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const double s0 = edges[k].s_begin;
    const double frac =
        result.region.overlap_length(s0, s0 + edges[k].length) / edges[k].length;
    result.g[k] = std::clamp(frac, 0.0, 1.0);
  }
}

}  // namespace

BathtubResult superlevel_region(const Mesh& mesh, std::span<const double> trace,
                                double measure) {
  const double perimeter = mesh.perimeter();
  if (!(measure > 0.0) || !(measure < perimeter))
    throw DomainError("superlevel_region needs 0 < A < perimeter");
  if (trace.size() != static_cast<std::size_t>(mesh.n_boundary_edges()))
    throw DomainError("trace length must match the boundary vertex count");

  BathtubResult result;
  const auto [min_it, max_it] = std::minmax_element(trace.begin(), trace.end());
  const double lo = *min_it;
  const double hi = *max_it;
  if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) {
    // total tie: decision rule picks the arc at s = 0
    result.degenerate = true;
    result.threshold = lo;
    result.tie_fraction = measure / perimeter;
    result.region = arc_region(0.5 * measure, measure, perimeter);
    fill_edge_fractions(mesh, result);
    return result;
  }

  // distinct nodal values, ascending
  std::vector<double> values(trace.begin(), trace.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  // largest nodal value whose closed superlevel measure still >= A
  // (measure is non-increasing in t and m(min) = P > A)
  std::size_t j = 0;
  for (std::size_t k = values.size(); k-- > 0;) {
    if (superlevel_measure(mesh, trace, values[k]) >= measure) {
      j = k;
      break;
    }
  }

  const double m_closed = superlevel_measure(mesh, trace, values[j]);
  const auto strict_pieces = superlevel_pieces(mesh, trace, values[j], true);
  double m_strict = 0.0;
  for (const auto& piece : strict_pieces) m_strict += piece.second - piece.first;

  if (m_strict <= measure && measure <= m_closed && m_closed > m_strict + 1e-14) {
    // the threshold sits on a flat stretch: keep {u > t} whole and trim the
    // tie arcs from the end with the largest arc coordinate
    result.threshold = values[j];
    auto ties = tie_arcs(mesh, trace, values[j]);
    double tie_total = 0.0;
    for (const auto& arc : ties) tie_total += arc.second - arc.first;
    double keep = measure - m_strict;
    result.tie_fraction = tie_total > 0.0 ? keep / tie_total : 0.0;
    std::sort(ties.begin(), ties.end());
    std::vector<std::pair<double, double>> kept = strict_pieces;
    for (const auto& arc : ties) {  // ascending: trim later arcs first
      const double len = arc.second - arc.first;
      if (keep <= 0.0) break;
      if (len <= keep) {
        kept.push_back(arc);
        keep -= len;
      } else {
        kept.emplace_back(arc.first, arc.first + keep);
        keep = 0.0;
      }
    }
    result.region = BoundaryRegion::from_intervals(perimeter, kept);
    fill_edge_fractions(mesh, result);
    return result;
  }

  // threshold lies strictly between nodal values: m(t) is linear there, so
  // two evaluations pin it exactly
  const double next = j + 1 < values.size() ? values[j + 1] : values[j];
  double t_star;
  if (next <= values[j]) {
    t_star = values[j];
  } else {
    const double ta = values[j] + (next - values[j]) / 3.0;
    const double tb = values[j] + 2.0 * (next - values[j]) / 3.0;
    const double ma = superlevel_measure(mesh, trace, ta);
    const double mb = superlevel_measure(mesh, trace, tb);
    if (ma == mb) {
      t_star = ta;
    } else {
      t_star = ta + (measure - ma) * (tb - ta) / (mb - ma);
      t_star = std::clamp(t_star, values[j], next);
    }
  }
  result.threshold = t_star;
  result.tie_fraction = 0.0;
  result.region = BoundaryRegion::from_intervals(
      perimeter, superlevel_pieces(mesh, trace, t_star, false));
  fill_edge_fractions(mesh, result);
  return result;
}

OptimalityStat optimality_residual(const Mesh& mesh,
                                   std::span<const double> trace,
                                   const BoundaryRegion& region) {
  OptimalityStat stat;
  const auto pts = region.endpoints();
  if (pts.size() < 2) {
    stat.no_endpoints = true;
    return stat;
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const RegionEndpoint& pt : pts) {
    const double v = mesh.trace_at(trace, pt.s);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  stat.value = hi - lo;
  return stat;
}

OptimalityStat optimality_residual(const Mesh& mesh, const StateSolution& state,
                                   const BoundaryRegion& region) {
  return optimality_residual(mesh, mesh.boundary_trace(state.nodal_u), region);
}

// ---------------------------------------------------------------------------
// best-response ascents

namespace {

std::vector<double> edge_means(std::span<const double> trace) {
  const std::size_t nb = trace.size();
  std::vector<double> means(nb);
  for (std::size_t k = 0; k < nb; ++k)
    means[k] = 0.5 * (trace[k] + trace[(k + 1) % nb]);
  return means;
}

double relative_change(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

RearrangementOutcome ascent_rearrangement(const Mesh& mesh,
                                          std::span<const double> f0,
                                          const SolverConfig& solver,
                                          const AscentConfig& ascent) {
  const auto& edges = mesh.boundary_edges();
  std::vector<double> lengths(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) lengths[k] = edges[k].length;

  if (f0.size() != lengths.size())
    throw DomainError("f0 must have one value per boundary edge");
  check_nonnegative(f0, "f0");
  double mean_len = 0.0;
  for (double l : lengths) mean_len += l;
  mean_len /= static_cast<double>(lengths.size());
  for (double l : lengths) {
    if (std::abs(l - mean_len) > 1e-9 * mean_len)
      throw ClassViolationError(
          "rearrangement class requires a uniform boundary partition");
  }

  RearrangementOutcome out;
  out.best_f.assign(f0.begin(), f0.end());
  out.state = solve_state(mesh, BoundaryLoad::per_edge(out.best_f), solver);
  out.j_value = cost_J(mesh, BoundaryLoad::per_edge(out.best_f), out.state);
  double sum_fl = 0.0;
  for (std::size_t k = 0; k < lengths.size(); ++k)
    sum_fl += out.best_f[k] * lengths[k];
  out.trace.records.push_back({0, out.j_value, 0.0, sum_fl, 0.0});
  out.trace.reason = StopReason::MaxIters;
  if (!out.state.converged) {
    out.trace.reason = StopReason::SolverFailure;
    return out;
  }

  for (int it = 1; it <= ascent.max_iters; ++it) {
    const auto trace_u = mesh.boundary_trace(out.state.nodal_u);
    std::vector<double> next_f =
        best_rearrangement(f0, edge_means(trace_u), lengths);
    const bool fixed_point = next_f == out.best_f;

    StateSolution next_state = solve_state(mesh, BoundaryLoad::per_edge(next_f),
                                           solver, out.state.nodal_u);
    if (!next_state.converged) {  // keep the last converged iterate
      out.trace.reason = StopReason::SolverFailure;
      break;
    }
    const double next_j =
        cost_J(mesh, BoundaryLoad::per_edge(next_f), next_state);
    const double rel = relative_change(next_j, out.j_value);
    out.best_f = std::move(next_f);
    out.state = std::move(next_state);
    out.j_value = next_j;
    out.trace.records.push_back({it, next_j, 0.0, sum_fl, rel});
    if (fixed_point) {
      out.trace.reason = StopReason::FixedPoint;
      break;
    }
    if (rel <= ascent.tol) {
      out.trace.reason = StopReason::Tolerance;
      break;
    }
  }
  return out;
}

BathtubOutcome ascent_bathtub(const Mesh& mesh, double measure,
                              const SolverConfig& solver,
                              const AscentConfig& ascent,
                              const BoundaryRegion& init) {
  if (!(measure > 0.0) || !(measure < mesh.perimeter()))
    throw DomainError("ascent_bathtub needs 0 < A < perimeter");

  BathtubOutcome out;
  out.region = init;
  out.state = solve_state(mesh, BoundaryLoad::indicator(out.region), solver);
  out.j_value = cost_J(mesh, BoundaryLoad::indicator(out.region), out.state);
  {
    const auto res = optimality_residual(mesh, out.state, out.region);
    out.trace.records.push_back(
        {0, out.j_value, 0.0, out.region.measure(), res.value});
  }
  out.trace.reason = StopReason::MaxIters;
  if (!out.state.converged) {
    out.trace.reason = StopReason::SolverFailure;
    return out;
  }

  const double endpoint_tol = 1e-12 * mesh.perimeter();
  for (int it = 1; it <= ascent.max_iters; ++it) {
    const auto trace_u = mesh.boundary_trace(out.state.nodal_u);
    BathtubResult level = superlevel_region(mesh, trace_u, measure);
    if (level.degenerate) {
      out.trace.reason = StopReason::Degenerate;
      break;
    }

    bool fixed_point = false;
    {
      const auto& a = out.region.intervals();
      const auto& b = level.region.intervals();
      if (a.size() == b.size()) {
        fixed_point = true;
        for (std::size_t k = 0; k < a.size(); ++k) {
          if (std::abs(a[k].s_begin - b[k].s_begin) > endpoint_tol ||
              std::abs(a[k].s_end - b[k].s_end) > endpoint_tol) {
            fixed_point = false;
            break;
          }
        }
      }
    }

    StateSolution next_state = solve_state(
        mesh, BoundaryLoad::indicator(level.region), solver, out.state.nodal_u);
    if (!next_state.converged) {  // keep the last converged iterate
      out.trace.reason = StopReason::SolverFailure;
      break;
    }
    const double next_j =
        cost_J(mesh, BoundaryLoad::indicator(level.region), next_state);
    const double rel = relative_change(next_j, out.j_value);
    out.region = std::move(level.region);
    out.state = std::move(next_state);
    out.j_value = next_j;
    const auto res = optimality_residual(mesh, out.state, out.region);
    out.trace.records.push_back(
        {it, next_j, level.threshold, out.region.measure(), res.value});
    if (fixed_point) {
      out.trace.reason = StopReason::FixedPoint;
      break;
    }
    if (rel <= ascent.tol) {
      out.trace.reason = StopReason::Tolerance;
      break;
    }
  }
  return out;
}

MultistartOutcome optimize_linfty(const Mesh& mesh, double measure,
                                  const SolverConfig& solver,
                                  const AscentConfig& ascent) {
  const double perimeter = mesh.perimeter();
  SplitMix64 rng(ascent.seed);
  MultistartOutcome out;
  for (int run = 0; run < std::max(1, ascent.multistart); ++run) {
    BoundaryRegion init;
    if (run == 0) {
      init = arc_region(0.0, measure, perimeter);
    } else if (run == 1) {
      init = arc_region(0.5 * perimeter, measure, perimeter);
    } else if (run % 2 == 0) {
      init = arc_region(rng.uniform(0.0, perimeter), measure, perimeter);
    } else {
      // two disjoint arcs at antipodal centers
      const double rho = rng.uniform(0.25, 0.5);
      const double c = rng.uniform(0.0, perimeter);
      const double len1 = rho * measure;
      const double len2 = measure - len1;
      const std::pair<double, double> ivs[2] = {
          {c - 0.5 * len1, c + 0.5 * len1},
          {c + 0.5 * perimeter - 0.5 * len2, c + 0.5 * perimeter + 0.5 * len2}};
      init = BoundaryRegion::from_intervals(perimeter, ivs);
    }
    out.runs.push_back(ascent_bathtub(mesh, measure, solver, ascent, init));
    if (out.runs.back().j_value > out.runs[out.best].j_value)
      out.best = run;
  }
  return out;
}

RearrangementMultistart optimize_rearrangement(const Mesh& mesh,
                                               std::span<const double> f0,
                                               const SolverConfig& solver,
                                               const AscentConfig& ascent) {
  SplitMix64 rng(ascent.seed);
  RearrangementMultistart out;
  for (int run = 0; run < std::max(1, ascent.multistart); ++run) {
    std::vector<double> start(f0.begin(), f0.end());
    if (run > 0) {
      for (std::size_t k = start.size(); k > 1; --k)
        std::swap(start[k - 1], start[rng.below(k)]);
    }
    out.runs.push_back(ascent_rearrangement(mesh, start, solver, ascent));
    if (out.runs.back().j_value > out.runs[out.best].j_value)
      out.best = run;
  }
  return out;
}

// ---------------------------------------------------------------------------
// trace extremal

namespace {

/// P1 stiffness + vertex-lumped mass for p = 2 (used by the linear
/// Steklov cross-check; assembled here independently of the fem module).
CsrMatrix linear_energy_matrix(const Mesh& mesh) {
  const auto& tris = mesh.triangles();
  const auto& verts = mesh.vertices();
  std::vector<int> rows, cols;
  std::vector<double> vals;
  rows.reserve(tris.size() * 9 + verts.size());
  cols.reserve(tris.size() * 9 + verts.size());
  vals.reserve(tris.size() * 9 + verts.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    const double area = mesh.triangle_area(static_cast<int>(t));
    const Vec2 p0 = verts[tri[0]], p1 = verts[tri[1]], p2 = verts[tri[2]];
    const double bx[3] = {(p1.y - p2.y) / (2 * area), (p2.y - p0.y) / (2 * area),
                          (p0.y - p1.y) / (2 * area)};
    const double by[3] = {(p2.x - p1.x) / (2 * area), (p0.x - p2.x) / (2 * area),
                          (p1.x - p0.x) / (2 * area)};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        rows.push_back(tri[i]);
        cols.push_back(tri[j]);
        vals.push_back(area * (bx[i] * bx[j] + by[i] * by[j]));
      }
      rows.push_back(tri[i]);
      cols.push_back(tri[i]);
      vals.push_back(area / 3.0);
    }
  }
  return CsrMatrix::from_triplets(mesh.n_vertices(), rows, cols, vals);
}

struct QuotientEval {
  double numerator = 0.0;     // eps-regularized p-energy (no 1/p)
  double denominator = 1.0;   // (lumped boundary q'-norm)^(p/q')
  double quotient() const { return numerator / denominator; }
};

class TraceQuotient {
 public:
  TraceQuotient(const Mesh& mesh, double p, double q_conj, double eps)
      : mesh_(mesh),
        p_(p),
        q_conj_(q_conj),
        eps_(eps),
        beta_(boundary_lumped_weights(mesh)) {
    const auto& tris = mesh.triangles();
    const auto& verts = mesh.vertices();
    bx_.resize(tris.size());
    by_.resize(tris.size());
    lumped_.assign(verts.size(), 0.0);
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const auto& tri = tris[t];
      const double area = mesh.triangle_area(static_cast<int>(t));
      const Vec2 p0 = verts[tri[0]], p1 = verts[tri[1]], p2 = verts[tri[2]];
      bx_[t] = {(p1.y - p2.y) / (2 * area), (p2.y - p0.y) / (2 * area),
                (p0.y - p1.y) / (2 * area)};
      by_[t] = {(p2.x - p1.x) / (2 * area), (p0.x - p2.x) / (2 * area),
                (p1.x - p0.x) / (2 * area)};
      for (int i = 0; i < 3; ++i) lumped_[tri[i]] += area / 3.0;
    }
  }

  double boundary_qnorm_power(std::span<const double> v) const {
    const auto& bverts = mesh_.boundary_vertices();
    double acc = 0.0;
    for (std::size_t k = 0; k < bverts.size(); ++k)
      acc += beta_[k] * std::pow(std::abs(v[bverts[k]]), q_conj_);
    return acc;  // sum beta |v|^q'
  }

  /// scales v so the lumped boundary q'-norm is exactly 1
  void normalize(std::vector<double>& v) const {
    const double d = boundary_qnorm_power(v);
    if (!(d > 0.0)) throw SolveError("zero boundary trace during normalization");
    const double scale = std::pow(d, -1.0 / q_conj_);
    for (double& x : v) x *= scale;
  }

  double numerator(std::span<const double> v) const {
    double acc = 0.0;
    for (std::size_t t = 0; t < bx_.size(); ++t) {
      double gx = 0.0, gy = 0.0;
      const auto& tri = mesh_.triangles()[t];
      for (int i = 0; i < 3; ++i) {
        gx += v[tri[i]] * bx_[t][i];
        gy += v[tri[i]] * by_[t][i];
      }
      acc += mesh_.triangle_area(static_cast<int>(t)) *
             std::pow(gx * gx + gy * gy + eps_ * eps_, 0.5 * p_);
    }
    for (std::size_t i = 0; i < lumped_.size(); ++i)
      acc += lumped_[i] * std::pow(std::abs(v[i]), p_);
    return acc;
  }

  double numerator_unregularized(std::span<const double> v) const {
    double acc = 0.0;
    for (std::size_t t = 0; t < bx_.size(); ++t) {
      double gx = 0.0, gy = 0.0;
      const auto& tri = mesh_.triangles()[t];
      for (int i = 0; i < 3; ++i) {
        gx += v[tri[i]] * bx_[t][i];
        gy += v[tri[i]] * by_[t][i];
      }
      acc += mesh_.triangle_area(static_cast<int>(t)) *
             std::pow(gx * gx + gy * gy, 0.5 * p_);
    }
    for (std::size_t i = 0; i < lumped_.size(); ++i)
      acc += lumped_[i] * std::pow(std::abs(v[i]), p_);
    return acc;
  }

  /// gradient of the quotient at a normalized v with quotient value qv
  void quotient_gradient(std::span<const double> v, double qv,
                         std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const auto& tris = mesh_.triangles();
    for (std::size_t t = 0; t < tris.size(); ++t) {
      double gx = 0.0, gy = 0.0;
      for (int i = 0; i < 3; ++i) {
        gx += v[tris[t][i]] * bx_[t][i];
        gy += v[tris[t][i]] * by_[t][i];
      }
      const double a = mesh_.triangle_area(static_cast<int>(t)) * p_ *
                       std::pow(gx * gx + gy * gy + eps_ * eps_, 0.5 * p_ - 1.0);
      for (int i = 0; i < 3; ++i)
        out[tris[t][i]] += a * (gx * bx_[t][i] + gy * by_[t][i]);
    }
    for (std::size_t i = 0; i < lumped_.size(); ++i) {
      const double au = std::abs(v[i]);
      if (au > 0.0)
        out[i] += lumped_[i] * p_ * std::pow(au, p_ - 1.0) * (v[i] > 0 ? 1 : -1);
    }
    const auto& bverts = mesh_.boundary_vertices();
    for (std::size_t k = 0; k < bverts.size(); ++k) {
      const double vb = v[bverts[k]];
      const double av = std::abs(vb);
      if (av > 0.0)
        out[bverts[k]] -=
            qv * p_ * beta_[k] * std::pow(av, q_conj_ - 1.0) * (vb > 0 ? 1 : -1);
    }
  }

 private:
  const Mesh& mesh_;
  double p_, q_conj_, eps_;
  std::vector<double> beta_;
  std::vector<std::array<double, 3>> bx_, by_;
  std::vector<double> lumped_;
};

}  // namespace

LqExtremal trace_extremal(const Mesh& mesh, double q, double p,
                          const SolverConfig& solver, int max_iters) {
  if (!(q > 1.0)) throw DomainError("trace extremal requires q > 1");
  if (!(p > 1.0)) throw DomainError("trace extremal requires p > 1");
  // 2-D trace admissibility: q must exceed p'/N' = p / (2 (p - 1))
  const double q_critical = p / (2.0 * (p - 1.0));
  if (q <= q_critical) {
    std::cerr << "warning: q = " << q
              << " is at or below the 2-D trace admissibility bound "
              << q_critical << "; continuing anyway\n";
  }

  LqExtremal extremal;
  extremal.q = q;
  extremal.q_conj = q / (q - 1.0);
  const TraceQuotient quotient(mesh, p, extremal.q_conj, solver.epsilon_min);

  const int n = mesh.n_vertices();
  std::vector<double> v(n, 1.0);
  quotient.normalize(v);
  double qv = quotient.numerator(v);

  std::vector<double> grad(n), grad_new(n), trial(n);
  quotient.quotient_gradient(v, qv, grad);
  double gnorm2 = kernels::dot(grad, grad);
  double step = 1.0 / std::max(std::sqrt(gnorm2), 1e-12);

  int consecutive_small = 0;
  int it = 0;
  for (; it < max_iters; ++it) {
    double alpha = step;
    double q_trial = qv;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      std::copy(v.begin(), v.end(), trial.begin());
      kernels::axpy(-alpha, grad, trial);
      for (double& x : trial) x = std::abs(x);  // nonnegativity projection
      double norm_power = quotient.boundary_qnorm_power(trial);
      if (!(norm_power > 0.0)) {
        // restart from the positive constant
        std::fill(trial.begin(), trial.end(), 1.0);
      }
      quotient.normalize(trial);
      q_trial = quotient.numerator(trial);
      if (q_trial < qv) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // stationary up to line-search resolution

    quotient.quotient_gradient(trial, q_trial, grad_new);
    // Barzilai-Borwein step from the accepted move
    double ss = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
      const double si = trial[i] - v[i];
      ss += si * si;
      sy += si * (grad_new[i] - grad[i]);
    }
    step = sy > 0.0 ? ss / sy : 1.0 / std::max(std::sqrt(kernels::dot(grad_new, grad_new)), 1e-12);

    const double rel = relative_change(q_trial, qv);
    v.swap(trial);
    grad.swap(grad_new);
    qv = q_trial;
    // spec stop: relative quotient change <= 1e-10 (required on several
    // consecutive iterates so a single short BB step cannot stop us early)
    consecutive_small = rel <= 1e-10 ? consecutive_small + 1 : 0;
    if (consecutive_small >= 5) {
      extremal.converged = true;
      break;
    }
  }
  if (!extremal.converged && it >= max_iters)
    throw SolveError("trace_extremal hit the iteration cap");

  extremal.converged = true;
  extremal.iterations = it;
  extremal.v = std::move(v);
  extremal.s_value = quotient.numerator_unregularized(extremal.v);
  return extremal;
}

double steklov_linear_S(const Mesh& mesh, double tol, int max_iters) {
  const CsrMatrix k_matrix = linear_energy_matrix(mesh);
  const std::vector<double> beta = boundary_lumped_weights(mesh);
  const auto& bverts = mesh.boundary_vertices();
  const int n = mesh.n_vertices();

  auto boundary_mass_apply = [&](std::span<const double> x,
                                 std::span<double> y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t k = 0; k < bverts.size(); ++k)
      y[bverts[k]] = beta[k] * x[bverts[k]];
  };

  std::vector<double> v(n, 1.0), mv(n), w(n, 0.0), kv(n);
  double s_prev = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    boundary_mass_apply(v, mv);
    const CgSummary cg = pcg_solve(k_matrix, mv, w, 1e-13, 40 * n + 200);
    if (!cg.converged) throw SolveError("Steklov inverse iteration: CG failed");
    // normalize in the boundary norm
    double bnorm = 0.0;
    for (std::size_t k = 0; k < bverts.size(); ++k)
      bnorm += beta[k] * w[bverts[k]] * w[bverts[k]];
    if (!(bnorm > 0.0)) throw SolveError("Steklov iterate lost its trace");
    const double scale = 1.0 / std::sqrt(bnorm);
    for (double& x : w) x *= scale;
    v = w;

    k_matrix.mult(v, kv);
    const double s = kernels::dot(v, kv);  // boundary norm is 1
    if (it > 0 && std::abs(s - s_prev) <= tol * s) return s;
    s_prev = s;
  }
  throw SolveError("Steklov inverse iteration did not converge");
}

LqLoadInfo lq_optimal_load(const Mesh& mesh, const LqExtremal& extremal,
                           double p) {
  if (!extremal.converged) throw SolveError("extremal is not converged");
  const auto& bverts = mesh.boundary_vertices();
  std::vector<double> fhat(bverts.size());
  for (std::size_t k = 0; k < bverts.size(); ++k)
    fhat[k] = std::pow(std::abs(extremal.v[bverts[k]]), extremal.q_conj - 1.0);

  LqLoadInfo info;
  const std::vector<double> beta = boundary_lumped_weights(mesh);
  double qnorm = 0.0;
  for (std::size_t k = 0; k < bverts.size(); ++k)
    qnorm += beta[k] * std::pow(fhat[k], extremal.q);
  info.load_q_norm = std::pow(qnorm, 1.0 / extremal.q);
  if (std::abs(info.load_q_norm - 1.0) > 1e-8)
    throw SolveError("optimal load lost its unit q-norm");

  info.load = BoundaryLoad::nodal_trace(std::move(fhat));
  info.predicted_j = std::pow(extremal.s_value, -1.0 / (p - 1.0));
  info.predicted_u_scale = info.predicted_j;
  return info;
}

}  // namespace membrane
