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

// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "membrane/disk_oracle.hpp"
#include "membrane/optimizers.hpp"
#include "membrane/rng.hpp"
#include "membrane/shape_derivative.hpp"

using namespace membrane;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [FAILED: " << what << "]";
    }
  }
};

int g_failures = 0;

void report(int number, const std::string& title, Criterion& c) {
  std::printf("AC-%d %s: %s%s\n", number, c.pass ? "PASS" : "FAIL",
              title.c_str(), c.detail.str().c_str());
  std::fflush(stdout);
  if (!c.pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

Mesh unit_disk(int refinements) {
  return build_mesh({DomainSpec::Kind::Disk, 1.0, 64, refinements});
}

BoundaryLoad cos_load(const Mesh& mesh) {
  std::vector<double> values;
  values.reserve(mesh.boundary_vertices().size());
  for (int v : mesh.boundary_vertices()) {
    const Vec2 p = mesh.vertices()[v];
    values.push_back(std::cos(std::atan2(p.y, p.x)));
  }
  return BoundaryLoad::nodal_trace(std::move(values));
}

// --------------------------------------------------------------------------

void ac1_oracle_agreement() {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  oracle::FourierLoad fl;
  fl.a = {1.0};
  fl.b = {0.0};
  const double j_oracle = oracle::solve_disk(fl).j_value;

  std::map<int, double> errs;
  SolverConfig solver;
  for (int r : {2, 3}) {
    const Mesh mesh = unit_disk(r);
    const BoundaryLoad load = cos_load(mesh);
    const StateSolution state = solve_state(mesh, load, solver);
    c.require(state.converged, "state solve converged at refinement " +
                                   std::to_string(r));
    errs[r] = std::abs(cost_J(mesh, load, state) - j_oracle);
  }
  c.require(errs[2] <= 0.01 * j_oracle, "1% agreement at two refinements");
  c.require(errs[3] <= errs[2] / 3.0, "error factor >= 3 per refinement");
  const double elapsed = seconds_since(start);
  c.require(elapsed <= 60.0, "runtime <= 60 s");
  c.detail << " J*=" << j_oracle << " err2=" << errs[2] << " err3=" << errs[3]
           << " t=" << elapsed << "s";
  report(1, "oracle agreement for p=2, f=cos theta", c);
}

void ac2_variational_identities() {
  Criterion c;
  SplitMix64 rng(2026);
  for (double p : {1.5, 2.0, 3.0}) {
    const Mesh mesh = unit_disk(1);
    SolverConfig solver;
    solver.p = p;
    solver.epsilon_min = 1e-6;
    const BoundaryLoad load = make_constant_load(mesh, 1.0);
    const StateSolution state = solve_state(mesh, load, solver);
    c.require(state.converged, "state converged at p=" + std::to_string(p));
    const double j = cost_J(mesh, load, state);
    const double i_value = functional_I(mesh, load, state.nodal_u, p);
    c.require(std::abs(i_value - j) / j <= 1e-3,
              "|I(u)-J|/J <= 1e-3 at p=" + std::to_string(p));
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> v = state.nodal_u;
      const double delta = trial % 2 == 0 ? 1e-3 : 0.2;
      for (double& x : v) x += delta * rng.uniform(-1.0, 1.0);
      c.require(functional_I(mesh, load, v, p) <= i_value + 1e-8,
                "I(u+dw) <= I(u) + 1e-8 at p=" + std::to_string(p));
    }
  }
  report(2, "variational identities of the state functional", c);
}

void ac3_homogeneity() {
  Criterion c;
  const DomainSpec domains[] = {{DomainSpec::Kind::Disk, 1.0, 64, 1},
                                {DomainSpec::Kind::Square, 1.0, 32, 1}};
  for (const DomainSpec& spec : domains) {
    const Mesh mesh = build_mesh(spec);
    std::vector<double> profile(mesh.n_boundary_edges());
    for (std::size_t k = 0; k < profile.size(); ++k)
      profile[k] = 1.0 + 0.5 * std::cos(2.0 * kPi * k / profile.size());
    const BoundaryLoad base = BoundaryLoad::per_edge(profile);
    for (double p : {1.5, 2.0, 3.0}) {
      SolverConfig solver;
      solver.p = p;
      const StateSolution u1 = solve_state(mesh, base, solver);
      const StateSolution u2 = solve_state(mesh, base.scaled(2.0), solver);
      c.require(u1.converged && u2.converged, "solves converged");
      const double j1 = cost_J(mesh, base, u1);
      const double j2 = cost_J(mesh, base.scaled(2.0), u2);
      c.require(std::abs(j2 - std::pow(2.0, p / (p - 1.0)) * j1) <= 1e-4 * j2,
                "homogeneity at p=" + std::to_string(p));
    }
  }
  report(3, "J(2f) = 2^(p/(p-1)) J(f) on disk and square", c);
}

void ac4_combinatorial_oracles() {
  Criterion c;
  SplitMix64 rng(4);

  // rearrangement against exhaustive permutation search
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(7);  // up to 8 cells
    std::vector<double> f0(n), u(n);
    const std::vector<double> len(n, 1.0);
    for (auto& x : f0) x = rng.uniform(0.0, 4.0);
    for (auto& x : u) x = rng.uniform(0.0, 1.0);
    const auto fhat = best_rearrangement(f0, u, len);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) value += fhat[i] * u[i];

    std::vector<double> perm = f0;
    std::sort(perm.begin(), perm.end());
    double best = -1e300;
    do {
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) v += perm[i] * u[i];
      best = std::max(best, v);
    } while (std::next_permutation(perm.begin(), perm.end()));
    c.require(std::abs(value - best) <= 1e-12, "rearrangement = enumeration");
  }

  // bathtub against exhaustive vertex enumeration
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    std::vector<double> u(n), len(n);
    for (auto& x : u) x = rng.uniform(-1.0, 2.0);
    for (auto& x : len) x = rng.uniform(0.2, 1.5);
    const double total = std::accumulate(len.begin(), len.end(), 0.0);
    const double measure = rng.uniform() * total;
    const BathtubResult r = bathtub_discrete(u, len, measure);
    double value = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      value += r.g[i] * u[i] * len[i];
      mass += r.g[i] * len[i];
    }
    c.require(std::abs(mass - measure) <= 1e-10 * std::max(1.0, measure),
              "bathtub feasibility");

    double best = -1e300;
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
      double used = 0.0, v = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) {
          used += len[i];
          v += u[i] * len[i];
        }
      }
      if (used > measure) continue;
      const double left = measure - used;
      double completion = left <= 1e-15 ? 0.0 : -1e300;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) continue;
        if (left <= len[i]) completion = std::max(completion, u[i] * left);
      }
      if (completion > -1e300) best = std::max(best, v + completion);
    }
    c.require(std::abs(value - best) <= 1e-12 * std::max(1.0, std::abs(best)),
              "bathtub = vertex enumeration");
  }
  report(4, "combinatorial optimizers match exhaustive search (200+200)", c);
}

void ac5_lq_case() {
  Criterion c;
  const Mesh mesh = unit_disk(2);
  SolverConfig solver;
  const LqExtremal extremal = trace_extremal(mesh, 2.0, 2.0, solver);
  c.require(extremal.converged, "extremal converged");

  // (a) discrete S against the Bessel value
  const double s_bessel = oracle::bessel_I(1, 1.0) / oracle::bessel_I(0, 1.0);
  c.require(std::abs(extremal.s_value - s_bessel) <= 1e-3 * s_bessel,
            "S within 1e-3 of I_1(1)/I_0(1)");
  // second route: linear inverse iteration
  const double s_linear = steklov_linear_S(mesh);
  c.require(std::abs(extremal.s_value - s_linear) <= 1e-6 * s_linear,
            "projected-gradient S equals inverse-iteration S");

  // (b) the explicit optimal load achieves the predicted J
  const LqLoadInfo info = lq_optimal_load(mesh, extremal, 2.0);
  const StateSolution state = solve_state(mesh, info.load, solver);
  c.require(state.converged, "optimal-load solve converged");
  const double achieved = cost_J(mesh, info.load, state);
  c.require(std::abs(achieved - info.predicted_j) <= 1e-3 * info.predicted_j,
            "J(f_hat) within 1e-3 of S^(-1/(p-1))");

  // (c) no feasible competitor beats it
  const auto beta = boundary_lumped_weights(mesh);
  SplitMix64 rng(5);
  int tested = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> f(beta.size());
    const double w1 = rng.uniform(-1.0, 1.0), w2 = rng.uniform(-1.0, 1.0);
    const double w3 = rng.uniform(-1.0, 1.0);
    const double phi1 = rng.uniform(0.0, 2 * kPi), phi2 = rng.uniform(0.0, 2 * kPi);
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double s = mesh.boundary_edges()[k].s_begin;
      f[k] = w3 + w1 * std::cos(s + phi1) + w2 * std::sin(3 * s + phi2);
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) norm += beta[k] * f[k] * f[k];
    if (norm <= 1e-12) continue;
    for (double& x : f) x /= std::sqrt(norm);
    const BoundaryLoad load = BoundaryLoad::nodal_trace(f);
    const StateSolution us = solve_state(mesh, load, solver);
    c.require(us.converged, "competitor solve converged");
    c.require(cost_J(mesh, load, us) <= info.predicted_j * (1.0 + 1e-3),
              "J(f) <= predicted (competitor " + std::to_string(trial) + ")");
    ++tested;
  }
  c.require(tested == 50, "all 50 competitors evaluated");
  c.detail << " S=" << extremal.s_value << " predicted_J=" << info.predicted_j
           << " achieved_J=" << achieved;
  report(5, "L^q unit-ball case at p=2, q=2", c);
}

void ac6_linfty_ascent() {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  const Mesh mesh = unit_disk(1);
  const double measure = kPi / 2;
  SolverConfig solver;
  AscentConfig ascent;
  ascent.multistart = 20;
  ascent.max_iters = 50;
  ascent.seed = 2026;

  const MultistartOutcome outcome = optimize_linfty(mesh, measure, solver, ascent);
  int two_arc_starts = 0;
  for (const BathtubOutcome& run : outcome.runs) {
    const auto& records = run.trace.records;
    for (std::size_t k = 1; k < records.size(); ++k)
      c.require(records[k].j_value >= records[k - 1].j_value - 1e-12,
                "monotone trace");
    c.require(records.back().iter <= 50, "terminates within 50 iterations");
    if (records.front().measure > 0 &&
        run.trace.records.front().iter == 0)
      two_arc_starts += 0;  // counted below from the initial region shape
  }
  // the multistart schedule alternates single- and two-arc starts
  for (std::size_t k = 3; k < outcome.runs.size(); k += 2) ++two_arc_starts;
  c.require(two_arc_starts >= 2, "includes two-arc initializations");

  const BathtubOutcome& best = outcome.runs[outcome.best];
  c.require(best.region.endpoints().size() == 2,
            "best region is a single interval");
  c.require(std::abs(best.region.measure() - measure) <= 1e-6,
            "measure within 1e-6 of A");

  const oracle::ArcSearchResult search =
      oracle::best_arc_search(measure, 50, ascent.seed);
  for (std::size_t k = 1; k < search.table.size(); ++k)
    c.require(best.j_value > search.table[k].j_value,
              "beats two-arc oracle configuration " + std::to_string(k));

  double max_u = 0.0;
  for (double u : best.state.nodal_u) max_u = std::max(max_u, u);
  const auto res = optimality_residual(mesh, best.state, best.region);
  c.require(!res.no_endpoints, "best region has endpoints");
  c.require(res.value <= 1e-3 * max_u, "optimality residual <= 1e-3 max u");

  const double elapsed = seconds_since(start);
  c.require(elapsed <= 300.0, "runtime <= 5 min");
  c.detail << " J_best=" << best.j_value
           << " residual=" << res.value << " t=" << elapsed << "s";
  report(6, "L^infty multistart ascent on the disk (A = pi/2)", c);
}

void ac7_shape_derivative() {
  Criterion c;
  const Mesh mesh = unit_disk(1);
  SolverConfig solver;

  // finite-difference validation on an arc with mid-edge endpoints
  const BoundaryRegion region =
      arc_region(kPi / 128.0, kPi / 2, mesh.perimeter());
  const TangentialVelocity velocity{{1.0, 0.0}};
  const std::vector<double> steps{1e-2, 5e-3, 2.5e-3};
  const DerivativeReport rep = fd_check(mesh, region, velocity, 2.0, solver, steps);

  for (const DerivativeEntry& e : rep.entries) {
    c.require(e.solver_ok, "perturbed solves converged");
    c.require(std::abs(e.fd_da - rep.formula_da) <= 1e-12,
              "fd_dA = formula_dA to 1e-12");
  }
  double prev = 1e300;
  for (const DerivativeEntry& e : rep.entries) {
    const double diff = std::abs(e.fd_dj - rep.formula_dj);
    c.require(diff < prev, "|fd_dJ - formula_dJ| decreases with t");
    prev = diff;
  }
  c.require(rep.order_meaningful && rep.observed_order >= 1.0,
            "observed order >= 1");
  c.require(prev <= 1e-2 * std::abs(rep.formula_dj),
            "final relative gap <= 1e-2");

  // rigid rotation of the symmetric arc
  const BoundaryRegion symmetric = arc_region(0.0, kPi / 2, mesh.perimeter());
  const StateSolution u0 =
      solve_state(mesh, BoundaryLoad::indicator(symmetric), solver);
  c.require(u0.converged, "symmetric-arc solve converged");
  double max_u = 0.0;
  for (double u : u0.nodal_u) max_u = std::max(max_u, u);
  const double dj_rot =
      shape_derivative_J(mesh, u0, symmetric, {{1.0, 1.0}}, 2.0);
  c.require(std::abs(dj_rot) <= 1e-6 * max_u,
            "rigid rotation derivative <= 1e-6 max u");

  c.detail << " formula_dJ=" << rep.formula_dj << " order=" << rep.observed_order
           << " final_gap=" << prev << " rot=" << dj_rot;
  report(7, "shape and measure derivatives vs finite differences", c);
}

void ac8_determinism() {
  Criterion c;
#ifndef MEMBRANE_CLI_PATH
  c.require(false, "CLI path not configured");
#else
  const fs::path base = fs::temp_directory_path() / "membrane_acceptance_ac8";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path config_path = base / "config.json";
  {
    std::ofstream cfg(config_path);
    cfg << R"({
  "domain": {"kind": "disk", "size": 1.0, "n_boundary": 32, "refinements": 1},
  "problem": {"p": 2.0, "class": "linfty", "A": 0.7853981633974483},
  "ascent": {"multistart": 5, "seed": 42},
  "output": {"directory": "PLACEHOLDER", "formats": ["csv", "json", "svg", "vtk"]}
})";
  }

  auto run_once = [&](const std::string& out_name) {
    const fs::path out = base / out_name;
    std::ostringstream cmd;
    cmd << MEMBRANE_CLI_PATH << " optimize --config " << config_path
        << " --out " << out << " --seed 42 > " << (base / (out_name + ".stdout"))
        << " 2> " << (base / (out_name + ".stderr"));
    return std::system(cmd.str().c_str());
  };

  c.require(run_once("a") == 0, "first run exits 0");
  c.require(run_once("b") == 0, "second run exits 0");

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(base / "a"))
    names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  c.require(!names.empty(), "outputs were written");
  for (const std::string& name : names) {
    std::ifstream fa(base / "a" / name, std::ios::binary);
    std::ifstream fb(base / "b" / name, std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    c.require(fb.good(), name + " exists in both runs");
    c.require(sa.str() == sb.str(), name + " is byte-identical");
  }
  c.detail << " files=" << names.size();
#endif
  report(8, "fixed-seed optimize runs are byte-identical", c);
}

}  // namespace

int main() {
  ac1_oracle_agreement();
  ac2_variational_identities();
  ac3_homogeneity();
  ac4_combinatorial_oracles();
  ac5_lq_case();
  ac6_linfty_ascent();
  ac7_shape_derivative();
  ac8_determinism();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
