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

#include "membrane/fem.hpp"

#include <algorithm>
#include <cmath>

#include "membrane/kernels.hpp"
#include "membrane/sparse.hpp"

namespace membrane {

void SolverConfig::validate() const {
  if (!(p > 1.0)) throw ConfigError("p must be greater than 1");
  if (!(epsilon_min > 0.0) || epsilon_min > epsilon_start)
    throw ConfigError("need 0 < epsilon_min <= epsilon_start");
  if (!(continuation_factor > 1.0))
    throw ConfigError("continuation_factor must exceed 1");
  if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
  if (max_newton < 1) throw ConfigError("max_newton must be at least 1");
  if (!(line_search_beta > 0.0 && line_search_beta < 1.0))
    throw ConfigError("line_search_beta must lie in (0,1)");
  if (!(line_search_c > 0.0 && line_search_c < 1.0))
    throw ConfigError("line_search_c must lie in (0,1)");
  if (!(linear_rtol > 0.0 && linear_rtol <= 1e-12))
    throw ConfigError("linear_rtol must lie in (0, 1e-12]");
}

BoundaryLoad BoundaryLoad::per_edge(std::vector<double> values) {
  BoundaryLoad load;
  load.payload_ = PerEdge{std::move(values)};
  return load;
}

BoundaryLoad BoundaryLoad::indicator(BoundaryRegion region, double amplitude) {
  BoundaryLoad load;
  load.payload_ = Indicator{std::move(region), amplitude};
  return load;
}

BoundaryLoad BoundaryLoad::nodal_trace(std::vector<double> values) {
  BoundaryLoad load;
  load.payload_ = NodalTrace{std::move(values)};
  return load;
}

BoundaryLoad::Kind BoundaryLoad::kind() const {
  if (std::holds_alternative<PerEdge>(payload_)) return Kind::PerEdge;
  if (std::holds_alternative<Indicator>(payload_)) return Kind::Indicator;
  return Kind::NodalTrace;
}

BoundaryLoad BoundaryLoad::scaled(double lambda) const {
  BoundaryLoad load = *this;
  if (auto* pe = std::get_if<PerEdge>(&load.payload_)) {
    for (double& v : pe->values) v *= lambda;
  } else if (auto* ind = std::get_if<Indicator>(&load.payload_)) {
    ind->amplitude *= lambda;
  } else {
    for (double& v : std::get<NodalTrace>(load.payload_).values) v *= lambda;
  }
  return load;
}

double BoundaryLoad::value_at(const Mesh& mesh, double s) const {
  switch (kind()) {
    case Kind::PerEdge:
      return as_per_edge().values.at(mesh.edge_at(s));
    case Kind::Indicator: {
      const Indicator& ind = as_indicator();
      return ind.region.contains(s) ? ind.amplitude : 0.0;
    }
    case Kind::NodalTrace:
      return mesh.trace_at(as_nodal().values, s);
  }
  return 0.0;
}

BoundaryLoad make_constant_load(const Mesh& mesh, double c) {
  return BoundaryLoad::per_edge(
      std::vector<double>(mesh.n_boundary_edges(), c));
}

std::vector<double> assemble_load(const Mesh& mesh, const BoundaryLoad& load) {
  std::vector<double> f(mesh.n_vertices(), 0.0);
  const auto& edges = mesh.boundary_edges();
  const std::size_t nb = edges.size();

  switch (load.kind()) {
    case BoundaryLoad::Kind::PerEdge: {
      const auto& values = load.as_per_edge().values;
      if (values.size() != nb)
        throw ConfigError("per-edge load length does not match boundary edge count");
      for (std::size_t k = 0; k < nb; ++k) {
        const double half = 0.5 * values[k] * edges[k].length;
        f[edges[k].a] += half;
        f[edges[k].b] += half;
      }
      break;
    }
    case BoundaryLoad::Kind::NodalTrace: {
      const auto& values = load.as_nodal().values;
      if (values.size() != nb)
        throw ConfigError("nodal-trace load length does not match boundary vertex count");
      for (std::size_t k = 0; k < nb; ++k) {
        const double fa = values[k];
        const double fb = values[(k + 1) % nb];
        const double len = edges[k].length;
        // exact linear x linear products on the edge
        f[edges[k].a] += len * (fa / 3.0 + fb / 6.0);
        f[edges[k].b] += len * (fa / 6.0 + fb / 3.0);
      }
      break;
    }
    case BoundaryLoad::Kind::Indicator: {
      const auto& ind = load.as_indicator();
      if (std::abs(ind.region.perimeter() - mesh.perimeter()) >
          1e-9 * mesh.perimeter())
        throw ConfigError("region perimeter does not match the mesh");
      for (std::size_t k = 0; k < nb; ++k) {
        const double s0 = edges[k].s_begin;
        const double len = edges[k].length;
        for (const ArcInterval& piece : ind.region.overlap(s0, s0 + len)) {
          // local coordinates on the edge
          const double alpha = piece.s_begin - s0;
          const double beta = piece.s_end - s0;
          const double mom0 = beta - alpha;                     // int 1
          const double mom1 = 0.5 * (beta * beta - alpha * alpha) / len;  // int sigma/len
          f[edges[k].a] += ind.amplitude * (mom0 - mom1);
          f[edges[k].b] += ind.amplitude * mom1;
        }
      }
      break;
    }
  }
  return f;
}

std::vector<double> boundary_lumped_weights(const Mesh& mesh) {
  const auto& edges = mesh.boundary_edges();
  const std::size_t nb = edges.size();
  std::vector<double> w(nb, 0.0);
  for (std::size_t k = 0; k < nb; ++k) {
    w[k] += 0.5 * edges[k].length;
    w[(k + 1) % nb] += 0.5 * edges[k].length;
  }
  return w;
}

namespace {

/// Precomputed element data for P1 assembly on a fixed mesh.
struct Assembler {
  const Mesh& mesh;
  // hat gradients per triangle: grad phi_i = (bx[i], by[i])
  std::vector<std::array<double, 3>> bx, by;
  std::vector<double> lumped;  // vertex-lumped area weights

  explicit Assembler(const Mesh& m) : mesh(m) {
    const auto& tris = m.triangles();
    const auto& verts = m.vertices();
    bx.resize(tris.size());
    by.resize(tris.size());
    lumped.assign(verts.size(), 0.0);
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const auto& tri = tris[t];
      const double area = m.triangle_area(static_cast<int>(t));
      const Vec2 p0 = verts[tri[0]], p1 = verts[tri[1]], p2 = verts[tri[2]];
      bx[t] = {(p1.y - p2.y) / (2 * area), (p2.y - p0.y) / (2 * area),
               (p0.y - p1.y) / (2 * area)};
      by[t] = {(p2.x - p1.x) / (2 * area), (p0.x - p2.x) / (2 * area),
               (p1.x - p0.x) / (2 * area)};
      for (int i = 0; i < 3; ++i) lumped[tri[i]] += area / 3.0;
    }
  }

  void element_gradient(std::size_t t, std::span<const double> u, double& gx,
                        double& gy) const {
    const auto& tri = mesh.triangles()[t];
    gx = gy = 0.0;
    for (int i = 0; i < 3; ++i) {
      gx += u[tri[i]] * bx[t][i];
      gy += u[tri[i]] * by[t][i];
    }
  }

  /// E_eps(u) minus the load term.
  double energy_reg(std::span<const double> u, double p, double eps) const {
    double acc = 0.0;
    const std::size_t nt = mesh.triangles().size();
    for (std::size_t t = 0; t < nt; ++t) {
      double gx, gy;
      element_gradient(t, u, gx, gy);
      acc += mesh.triangle_area(static_cast<int>(t)) *
             std::pow(gx * gx + gy * gy + eps * eps, 0.5 * p);
    }
    for (std::size_t i = 0; i < lumped.size(); ++i)
      acc += lumped[i] * std::pow(std::abs(u[i]), p);
    return acc / p;
  }

  /// gradient of E_eps including the load term; returns its l2 norm.
  double gradient(std::span<const double> u, double p, double eps,
                  std::span<const double> load_vec, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const auto& tris = mesh.triangles();
    for (std::size_t t = 0; t < tris.size(); ++t) {
      double gx, gy;
      element_gradient(t, u, gx, gy);
      const double a = mesh.triangle_area(static_cast<int>(t)) *
                       std::pow(gx * gx + gy * gy + eps * eps, 0.5 * p - 1.0);
      for (int i = 0; i < 3; ++i)
        out[tris[t][i]] += a * (gx * bx[t][i] + gy * by[t][i]);
    }
    for (std::size_t i = 0; i < lumped.size(); ++i) {
      const double au = std::abs(u[i]);
      if (au > 0.0)
        out[i] += lumped[i] * std::pow(au, p - 1.0) * (u[i] > 0 ? 1.0 : -1.0);
      out[i] -= load_vec[i];
    }
    double nrm2 = 0.0;
    for (double v : out) nrm2 += v * v;
    return std::sqrt(nrm2);
  }

  /// Hessian of E_eps. The |u|^p term's second derivative is evaluated as
  /// (p-1)(u^2+eps^2)^((p-2)/2): bounded near u = 0 for p < 2 and strictly
  /// positive there for p > 2 (the exact coefficient vanishes at u = 0,
  /// which would leave a singular pure-stiffness matrix at a cold start).
  /// The gradient stays exact, so the Newton fixed point is unchanged.
  CsrMatrix hessian(std::span<const double> u, double p, double eps) const {
    const auto& tris = mesh.triangles();
    const std::size_t nt = tris.size();
    std::vector<int> rows, cols;
    std::vector<double> vals;
    rows.reserve(nt * 9 + lumped.size());
    cols.reserve(nt * 9 + lumped.size());
    vals.reserve(nt * 9 + lumped.size());
    for (std::size_t t = 0; t < nt; ++t) {
      double gx, gy;
      element_gradient(t, u, gx, gy);
      const double g2e = gx * gx + gy * gy + eps * eps;
      const double area = mesh.triangle_area(static_cast<int>(t));
      const double a = area * std::pow(g2e, 0.5 * p - 1.0);
      const double b = area * (p - 2.0) * std::pow(g2e, 0.5 * p - 2.0);
      for (int i = 0; i < 3; ++i) {
        const double gdi = gx * bx[t][i] + gy * by[t][i];
        for (int j = 0; j < 3; ++j) {
          const double gdj = gx * bx[t][j] + gy * by[t][j];
          const double kij =
              a * (bx[t][i] * bx[t][j] + by[t][i] * by[t][j]) + b * gdi * gdj;
          rows.push_back(tris[t][i]);
          cols.push_back(tris[t][j]);
          vals.push_back(kij);
        }
      }
    }
    for (std::size_t i = 0; i < lumped.size(); ++i) {
      const double coef = std::pow(u[i] * u[i] + eps * eps, 0.5 * p - 1.0);
      rows.push_back(static_cast<int>(i));
      cols.push_back(static_cast<int>(i));
      vals.push_back(lumped[i] * (p - 1.0) * coef);
    }
    return CsrMatrix::from_triplets(static_cast<int>(lumped.size()), rows, cols,
                                    vals);
  }

  double energy_unreg(std::span<const double> u, double p) const {
    double acc = 0.0;
    const std::size_t nt = mesh.triangles().size();
    for (std::size_t t = 0; t < nt; ++t) {
      double gx, gy;
      element_gradient(t, u, gx, gy);
      acc += mesh.triangle_area(static_cast<int>(t)) *
             std::pow(gx * gx + gy * gy, 0.5 * p);
    }
    for (std::size_t i = 0; i < lumped.size(); ++i)
      acc += lumped[i] * std::pow(std::abs(u[i]), p);
    return acc;
  }
};

}  // namespace

StateSolution solve_state(const Mesh& mesh, const BoundaryLoad& load,
                          const SolverConfig& config,
                          std::span<const double> initial_guess) {
  config.validate();
  const Assembler assembler(mesh);
  const std::vector<double> f = assemble_load(mesh, load);
  const int n = mesh.n_vertices();

  StateSolution sol;
  sol.p_used = config.p;
  sol.epsilon_final = config.epsilon_min;
  if (initial_guess.empty()) {
    sol.nodal_u.assign(n, 0.0);
  } else {
    if (static_cast<int>(initial_guess.size()) != n)
      throw ConfigError("initial guess has wrong length");
    sol.nodal_u.assign(initial_guess.begin(), initial_guess.end());
  }

  std::vector<double> grad(n), direction(n), trial(n);
  const double p = config.p;

  // continuation schedule: epsilon_start, /factor, ..., epsilon_min
  std::vector<double> schedule;
  for (double eps = config.epsilon_start; eps > config.epsilon_min;
       eps /= config.continuation_factor)
    schedule.push_back(eps);
  schedule.push_back(config.epsilon_min);

  bool converged_final = false;
  for (double eps : schedule) {
    auto& stage_log = sol.stage_energies.emplace_back();
    double e_current = assembler.energy_reg(sol.nodal_u, p, eps) -
                       kernels::dot(f, sol.nodal_u);
    stage_log.push_back(e_current);
    double res = assembler.gradient(sol.nodal_u, p, eps, f, grad);
    int it = 0;
    while (res > config.newton_tol && it < config.max_newton) {
      const CsrMatrix h = assembler.hessian(sol.nodal_u, p, eps);
      std::fill(direction.begin(), direction.end(), 0.0);
      std::vector<double> rhs(grad);
      for (double& v : rhs) v = -v;
      const CgSummary cg = pcg_solve(h, rhs, direction, config.linear_rtol,
                                     40 * n + 200);
      if (!cg.converged)
        throw SolveError("linear solve failed (CG did not reach tolerance)");

      const double slope = kernels::dot(grad, direction);  // negative
      // Sufficient-decrease test with a roundoff allowance: near the
      // minimizer the true decrease drops below the floating resolution of
      // E, and without the allowance the search would truncate steps that
      // still shrink the gradient quadratically.
      const double roundoff = 16.0 * 2.22e-16 * std::abs(e_current);
      double step = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        std::copy(sol.nodal_u.begin(), sol.nodal_u.end(), trial.begin());
        kernels::axpy(step, direction, trial);
        const double e_trial =
            assembler.energy_reg(trial, p, eps) - kernels::dot(f, trial);
        if (e_trial <= e_current + config.line_search_c * step * slope + roundoff) {
          sol.nodal_u.swap(trial);
          e_current = e_trial;
          accepted = true;
          break;
        }
        step *= config.line_search_beta;
      }
      if (!accepted) break;  // line search exhausted; report residual as-is
      stage_log.push_back(e_current);
      res = assembler.gradient(sol.nodal_u, p, eps, f, grad);
      ++it;
      ++sol.newton_iterations;
    }
    if (eps == config.epsilon_min) converged_final = res <= config.newton_tol;
    sol.residual_norm = res;
  }
  sol.converged = converged_final;
  sol.energy_value = assembler.energy_unreg(sol.nodal_u, p);
  return sol;
}

double energy(const Mesh& mesh, std::span<const double> u, double p) {
  return Assembler(mesh).energy_unreg(u, p);
}

double energy(const Mesh& mesh, const StateSolution& state) {
  return energy(mesh, state.nodal_u, state.p_used);
}

double cost_J(const Mesh& mesh, const BoundaryLoad& load,
              std::span<const double> u) {
  const std::vector<double> f = assemble_load(mesh, load);
  return kernels::dot(f, u);
}

double cost_J(const Mesh& mesh, const BoundaryLoad& load,
              const StateSolution& state) {
  return cost_J(mesh, load, state.nodal_u);
}

double functional_I(const Mesh& mesh, const BoundaryLoad& load,
                    std::span<const double> v, double p) {
  if (!(p > 1.0)) throw ConfigError("functional I requires p > 1");
  const double load_term = cost_J(mesh, load, v);
  return (p * load_term - energy(mesh, v, p)) / (p - 1.0);
}

}  // namespace membrane
