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
#include <numbers>

#include "membrane/disk_oracle.hpp"
#include "membrane/fem.hpp"
#include "membrane/rng.hpp"
#include "test_util.hpp"

using namespace membrane;

namespace {
constexpr double kPi = std::numbers::pi;

Mesh unit_disk(int refinements) {
  return build_mesh({DomainSpec::Kind::Disk, 1.0, 64, refinements});
}

SolverConfig config_for(double p) {
  SolverConfig config;
  config.p = p;
  return config;
}

}  // namespace

TEST_CASE("assemble_load: constant 1 gives half the adjacent edge lengths") {
  const Mesh mesh = build_mesh({DomainSpec::Kind::Square, 1.0, 8, 0});
  const auto f = assemble_load(mesh, make_constant_load(mesh, 1.0));
  std::vector<double> expected(mesh.n_vertices(), 0.0);
  for (const BoundaryEdge& e : mesh.boundary_edges()) {
    expected[e.a] += 0.5 * e.length;
    expected[e.b] += 0.5 * e.length;
  }
  for (int i = 0; i < mesh.n_vertices(); ++i)
    CHECK(f[i] == doctest::Approx(expected[i]).epsilon(1e-15));
  double total = 0.0;
  for (double v : f) total += v;
  CHECK(total == doctest::Approx(mesh.perimeter()).epsilon(1e-14));
}

TEST_CASE("assemble_load: empty region gives the zero vector") {
  const Mesh mesh = build_mesh({DomainSpec::Kind::Square, 1.0, 4, 0});
  const auto f = assemble_load(
      mesh, BoundaryLoad::indicator(arc_region(0.0, 0.0, mesh.perimeter())));
  for (double v : f) CHECK(v == 0.0);
}

TEST_CASE("assemble_load: sub-edge indicator against the quadrature oracle") {
  const Mesh mesh = build_mesh({DomainSpec::Kind::Square, 1.0, 4, 0});
  // region [0.2, 0.7) inside the first edge (length 1)
  const std::pair<double, double> iv{0.2, 0.7};
  const auto f = assemble_load(
      mesh, BoundaryLoad::indicator(
                BoundaryRegion::from_intervals(mesh.perimeter(), std::span(&iv, 1))));
  const BoundaryEdge& e0 = mesh.boundary_edges()[0];
  const double hat_a = testutil::integrate(
      [&](double s) { return 1.0 - s / e0.length; }, 0.2, 0.7);
  const double hat_b = testutil::integrate(
      [&](double s) { return s / e0.length; }, 0.2, 0.7);
  CHECK(f[e0.a] == doctest::Approx(hat_a).epsilon(1e-14));
  CHECK(f[e0.b] == doctest::Approx(hat_b).epsilon(1e-14));
  double total = 0.0;
  for (double v : f) total += v;
  CHECK(total == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("assemble_load: nodal trace uses exact linear-linear integrals") {
  const Mesh mesh = build_mesh({DomainSpec::Kind::Square, 1.0, 4, 0});
  std::vector<double> values{1.0, 2.0, -1.0, 0.5};
  const auto f = assemble_load(mesh, BoundaryLoad::nodal_trace(values));
  // oracle: integrate f(s) * hat(s) over both edges adjacent to each vertex
  const auto& edges = mesh.boundary_edges();
  const std::size_t nb = edges.size();
  for (std::size_t k = 0; k < nb; ++k) {
    const std::size_t prev = (k + nb - 1) % nb;
    auto f_on = [&](std::size_t e, double t) {  // t in [0,1] along edge e
      return values[e] * (1.0 - t) + values[(e + 1) % nb] * t;
    };
    const double expected =
        testutil::integrate([&](double t) { return f_on(prev, t) * t; }, 0.0, 1.0) *
            edges[prev].length +
        testutil::integrate([&](double t) { return f_on(k, t) * (1.0 - t); }, 0.0,
                            1.0) *
            edges[k].length;
    CHECK(f[edges[k].a] == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("assemble_load rejects size mismatches") {
  const Mesh mesh = build_mesh({DomainSpec::Kind::Square, 1.0, 4, 0});
  CHECK_THROWS_AS(assemble_load(mesh, BoundaryLoad::per_edge({1.0, 2.0})),
                  ConfigError);
  CHECK_THROWS_AS(assemble_load(mesh, BoundaryLoad::nodal_trace({1.0})),
                  ConfigError);
}

TEST_CASE("zero load solves to the zero state immediately") {
  const Mesh mesh = unit_disk(0);
  const StateSolution sol =
      solve_state(mesh, make_constant_load(mesh, 0.0), config_for(2.0));
  CHECK(sol.converged);
  CHECK(sol.newton_iterations == 0);
  CHECK(sol.residual_norm == 0.0);
  for (double u : sol.nodal_u) CHECK(u == 0.0);
  CHECK(energy(mesh, sol) == 0.0);
}

TEST_CASE("p=2 disk with f=1 converges to the Bessel profile") {
  double prev_err = 1e300;
  for (int refinements : {0, 1, 2}) {
    const Mesh mesh = unit_disk(refinements);
    const StateSolution sol =
        solve_state(mesh, make_constant_load(mesh, 1.0), config_for(2.0));
    REQUIRE(sol.converged);
    double max_err = 0.0;
    for (int i = 0; i < mesh.n_vertices(); ++i) {
      const Vec2 p = mesh.vertices()[i];
      const double r = std::hypot(p.x, p.y);
      const double exact = oracle::bessel_I(0, r) / oracle::bessel_I(1, 1.0);
      max_err = std::max(max_err, std::abs(sol.nodal_u[i] - exact));
    }
    CHECK(max_err < prev_err / 1.9);  // roughly O(h^2), at least halving
    prev_err = max_err;
  }
  CHECK(prev_err < 5e-3);
}

TEST_CASE("homogeneity: doubling the load at p=3 scales u by sqrt(2)") {
  const Mesh mesh = unit_disk(0);
  const StateSolution u1 =
      solve_state(mesh, make_constant_load(mesh, 1.0), config_for(3.0));
  const StateSolution u2 =
      solve_state(mesh, make_constant_load(mesh, 2.0), config_for(3.0));
  REQUIRE(u1.converged);
  REQUIRE(u2.converged);
  const double factor = std::sqrt(2.0);
  for (int i = 0; i < mesh.n_vertices(); ++i)
    CHECK(u2.nodal_u[i] ==
          doctest::Approx(factor * u1.nodal_u[i]).epsilon(1e-6));
}

TEST_CASE("energy of simple fields") {
  const Mesh mesh = build_mesh({DomainSpec::Kind::Square, 1.0, 8, 1});
  const std::vector<double> zero(mesh.n_vertices(), 0.0);
  CHECK(energy(mesh, zero, 2.0) == 0.0);
  for (double p : {1.5, 2.0, 3.0}) {
    const std::vector<double> c(mesh.n_vertices(), -0.7);
    CHECK(energy(mesh, c, p) ==
          doctest::Approx(std::pow(0.7, p)).epsilon(1e-13));
  }
}

TEST_CASE("energy equals J at converged solutions (weak form with v = u)") {
  for (double p : {2.0, 3.0}) {
    const Mesh mesh = unit_disk(1);
    const BoundaryLoad load = make_constant_load(mesh, 1.0);
    const StateSolution sol = solve_state(mesh, load, config_for(p));
    REQUIRE(sol.converged);
    const double j = cost_J(mesh, load, sol);
    CHECK(std::abs(sol.energy_value - j) / std::max(sol.energy_value, 1e-12) <=
          1e-3);
  }
}

TEST_CASE("cost_J homogeneity: J(2f) = 2^(p/(p-1)) J(f) at p=3") {
  const Mesh mesh = unit_disk(0);
  const BoundaryLoad f1 = make_constant_load(mesh, 1.0);
  const BoundaryLoad f2 = f1.scaled(2.0);
  const StateSolution u1 = solve_state(mesh, f1, config_for(3.0));
  const StateSolution u2 = solve_state(mesh, f2, config_for(3.0));
  const double j1 = cost_J(mesh, f1, u1);
  const double j2 = cost_J(mesh, f2, u2);
  CHECK(std::abs(j2 - std::pow(2.0, 1.5) * j1) <= 1e-4 * j2);
}

TEST_CASE("homogeneity property across p and lambda") {
  const Mesh mesh = unit_disk(0);
  for (double p : {1.5, 2.0, 3.0}) {
    const BoundaryLoad base = make_constant_load(mesh, 1.0);
    const StateSolution ub = solve_state(mesh, base, config_for(p));
    const double jb = cost_J(mesh, base, ub);
    for (double lambda : {0.5, 2.0}) {
      const BoundaryLoad scaled = base.scaled(lambda);
      const StateSolution us = solve_state(mesh, scaled, config_for(p));
      const double js = cost_J(mesh, scaled, us);
      CHECK(std::abs(js - std::pow(lambda, p / (p - 1.0)) * jb) <=
            1e-4 * std::abs(js));
    }
  }
}

TEST_CASE("functional_I: zero field gives zero") {
  const Mesh mesh = unit_disk(0);
  const std::vector<double> zero(mesh.n_vertices(), 0.0);
  CHECK(functional_I(mesh, make_constant_load(mesh, 1.0), zero, 2.0) == 0.0);
}

TEST_CASE("functional_I is maximized by the state, with value J") {
  SplitMix64 rng(5);
  for (double p : {1.5, 2.0, 3.0}) {
    const Mesh mesh = unit_disk(1);
    const BoundaryLoad load = make_constant_load(mesh, 1.0);
    const StateSolution sol = solve_state(mesh, load, config_for(p));
    REQUIRE(sol.converged);
    const double j = cost_J(mesh, load, sol);
    const double i_at_u = functional_I(mesh, load, sol.nodal_u, p);
    CHECK(std::abs(i_at_u - j) <= 1e-3 * std::abs(j));

    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> v = sol.nodal_u;
      const double delta = trial % 2 == 0 ? 1e-3 : 0.3;
      for (double& x : v) x += delta * rng.uniform(-1.0, 1.0);
      CHECK(functional_I(mesh, load, v, p) <= i_at_u + 1e-8);
    }
  }
}

TEST_CASE("line search never increases the stage energy") {
  const Mesh mesh = unit_disk(0);
  for (double p : {1.5, 3.0}) {
    const StateSolution sol =
        solve_state(mesh, make_constant_load(mesh, 1.0), config_for(p));
    REQUIRE(sol.converged);
    for (const auto& stage : sol.stage_energies) {
      for (std::size_t k = 1; k < stage.size(); ++k)
        CHECK(stage[k] <= stage[k - 1] + 1e-14 * std::abs(stage[k - 1]));
    }
  }
}

TEST_CASE("nonnegative load keeps the discrete state nonnegative") {
  const Mesh mesh = unit_disk(1);
  for (double p : {1.5, 2.0, 3.0}) {
    const StateSolution sol = solve_state(
        mesh, BoundaryLoad::indicator(arc_region(1.0, 2.0, mesh.perimeter())),
        config_for(p));
    REQUIRE(sol.converged);
    double min_u = 1e300;
    for (double u : sol.nodal_u) min_u = std::min(min_u, u);
    CHECK(min_u >= -1e-10);
  }
}

TEST_CASE("energy identity residual shrinks with epsilon_min") {
  const Mesh mesh = unit_disk(0);
  for (double p : {1.5, 3.0}) {
    double prev = 1e300;
    for (double eps_min : {1e-2, 1e-4, 1e-6}) {
      SolverConfig config = config_for(p);
      config.epsilon_min = eps_min;
      const BoundaryLoad load = make_constant_load(mesh, 1.0);
      const StateSolution sol = solve_state(mesh, load, config);
      REQUIRE(sol.converged);
      const double gap = std::abs(cost_J(mesh, load, sol) - sol.energy_value);
      CHECK(gap <= prev * (1.0 + 1e-12));
      prev = gap;
    }
  }
}

TEST_CASE("warm starts preserve the fixed point") {
  const Mesh mesh = unit_disk(0);
  const BoundaryLoad load = make_constant_load(mesh, 1.0);
  const StateSolution cold = solve_state(mesh, load, config_for(2.0));
  const StateSolution warm = solve_state(mesh, load, config_for(2.0), cold.nodal_u);
  CHECK(warm.converged);
  CHECK(warm.newton_iterations <= 1);
  for (int i = 0; i < mesh.n_vertices(); ++i)
    CHECK(warm.nodal_u[i] == doctest::Approx(cold.nodal_u[i]).epsilon(1e-10));
}

TEST_CASE("solver config validation") {
  SolverConfig config;
  config.p = 1.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = SolverConfig{};
  config.epsilon_min = 0.5;  // above epsilon_start
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = SolverConfig{};
  config.linear_rtol = 1e-10;  // looser than the contract
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("non-convergence is reported, not thrown") {
  const Mesh mesh = unit_disk(0);
  SolverConfig config = config_for(3.0);
  // a single starved stage: two Newton steps from a cold start cannot
  // finish the nonlinear solve
  config.epsilon_start = config.epsilon_min = 1e-6;
  config.max_newton = 2;
  const StateSolution sol = solve_state(mesh, make_constant_load(mesh, 1.0), config);
  CHECK(!sol.converged);
  CHECK(sol.residual_norm > config.newton_tol);
}
