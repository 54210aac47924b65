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

#include "membrane/shape_derivative.hpp"

#include <algorithm>
#include <cmath>

namespace membrane {

namespace {

void check_velocity(const BoundaryRegion& region,
                    const TangentialVelocity& velocity) {
  const auto pts = region.endpoints();
  if (velocity.speeds.size() != pts.size())
    throw DomainError("velocity must have one speed per region endpoint");
  for (double v : velocity.speeds) {
    if (!std::isfinite(v)) throw DomainError("velocity speeds must be finite");
  }
}

}  // namespace

BoundaryRegion perturb_region(const BoundaryRegion& region,
                              const TangentialVelocity& velocity, double t) {
  check_velocity(region, velocity);
  const auto pts = region.endpoints();
  if (pts.empty()) return region;  // empty or full region: nothing moves
  const double perimeter = region.perimeter();

  // Pair endpoints into intervals in loop order starting from the first
  // interval begin (sign -1). Signs alternate, so pts outlines the region
  // as begin/end pairs once rotated to start on a begin.
  const std::size_t n = pts.size();
  std::size_t first_begin = 0;
  while (first_begin < n && pts[first_begin].sign != -1) ++first_begin;

  std::vector<double> moved(n);
  for (std::size_t k = 0; k < n; ++k)
    moved[k] = pts[k].s + t * velocity.speeds[k];

  std::vector<std::pair<double, double>> intervals;
  for (std::size_t k = 0; k < n; k += 2) {
    const std::size_t ib = (first_begin + k) % n;
    const std::size_t ie = (first_begin + k + 1) % n;
    const double begin_old = pts[ib].s;
    const double end_old = pts[ie].s;
    const double old_len =
        std::fmod(end_old - begin_old + perimeter, perimeter);
    const double new_len = old_len + (moved[ie] - pts[ie].s) - (moved[ib] - pts[ib].s);
    if (!(new_len > 0.0) || !(new_len < perimeter))
      throw PerturbationTooLarge("perturbation closes or wraps an interval");
    intervals.emplace_back(moved[ib], moved[ib] + new_len);
  }
  // gaps must stay positive as well: next begin minus current end
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    const std::size_t kn = (k + 1) % intervals.size();
    const std::size_t ie = (first_begin + 2 * k + 1) % n;
    const std::size_t ib_next = (first_begin + 2 * kn) % n;
    const double gap_old =
        std::fmod(pts[ib_next].s - pts[ie].s + perimeter, perimeter);
    const double gap_new =
        gap_old + (moved[ib_next] - pts[ib_next].s) - (moved[ie] - pts[ie].s);
    if (!(gap_new > 0.0))
      throw PerturbationTooLarge("perturbation merges adjacent intervals");
  }
  return BoundaryRegion::from_intervals(perimeter, intervals);
}

double shape_derivative_J(const Mesh& mesh, const StateSolution& u0,
                          const BoundaryRegion& region,
                          const TangentialVelocity& velocity, double p) {
  check_velocity(region, velocity);
  if (!(p > 1.0)) throw DomainError("shape derivative requires p > 1");
  const auto pts = region.endpoints();
  const auto trace = mesh.boundary_trace(u0.nodal_u);
  double acc = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k)
    acc += mesh.trace_at(trace, pts[k].s) * pts[k].sign * velocity.speeds[k];
  return p / (p - 1.0) * acc;
}

double area_derivative(const BoundaryRegion& region,
                       const TangentialVelocity& velocity) {
  check_velocity(region, velocity);
  const auto pts = region.endpoints();
  double acc = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k)
    acc += pts[k].sign * velocity.speeds[k];
  return acc;
}

DerivativeReport fd_check(const Mesh& mesh, const BoundaryRegion& region,
                          const TangentialVelocity& velocity, double p,
                          const SolverConfig& solver,
                          std::span<const double> step_sizes) {
  for (std::size_t k = 0; k < step_sizes.size(); ++k) {
    if (!(step_sizes[k] > 0.0))
      throw DomainError("step sizes must be positive");
    if (k > 0 && !(step_sizes[k] < step_sizes[k - 1]))
      throw DomainError("step sizes must be strictly decreasing");
  }

  DerivativeReport report;
  const StateSolution base =
      solve_state(mesh, BoundaryLoad::indicator(region), solver);
  if (!base.converged) throw SolveError("base state did not converge");
  report.j_zero = cost_J(mesh, BoundaryLoad::indicator(region), base);
  report.formula_dj = shape_derivative_J(mesh, base, region, velocity, p);
  report.formula_da = area_derivative(region, velocity);

  auto j_of = [&](const BoundaryRegion& r, bool& ok) {
    const StateSolution s = solve_state(mesh, BoundaryLoad::indicator(r), solver,
                                        base.nodal_u);
    ok = s.converged;
    return cost_J(mesh, BoundaryLoad::indicator(r), s);
  };

  for (double t : step_sizes) {
    DerivativeEntry entry;
    entry.t = t;
    const BoundaryRegion plus = perturb_region(region, velocity, t);
    const BoundaryRegion minus = perturb_region(region, velocity, -t);
    bool ok_plus = true, ok_minus = true;
    entry.j_plus = j_of(plus, ok_plus);
    entry.j_minus = j_of(minus, ok_minus);
    entry.solver_ok = ok_plus && ok_minus;
    entry.fd_dj = (entry.j_plus - entry.j_minus) / (2.0 * t);
    entry.fd_da = (plus.measure() - minus.measure()) / (2.0 * t);
    report.entries.push_back(entry);
  }

  // order fit on the entries whose difference rises above solver noise
  const double noise = 1e-13 * (1.0 + std::abs(report.formula_dj));
  std::vector<std::pair<double, double>> logs;
  for (const DerivativeEntry& e : report.entries) {
    const double diff = std::abs(e.fd_dj - report.formula_dj);
    if (e.solver_ok && diff > noise)
      logs.emplace_back(std::log(e.t), std::log(diff));
  }
  if (logs.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : logs) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = static_cast<double>(logs.size());
    report.observed_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    report.order_meaningful = true;
  }
  return report;
}

}  // namespace membrane
