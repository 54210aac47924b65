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

#include "membrane/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>

#include <json.hpp>

#include "membrane/disk_oracle.hpp"
#include "membrane/io.hpp"
#include "membrane/shape_derivative.hpp"

namespace membrane {

namespace {

using nlohmann::ordered_json;

const char* reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::Tolerance: return "tolerance";
    case StopReason::MaxIters: return "max_iters";
    case StopReason::FixedPoint: return "fixed_point";
    case StopReason::Degenerate: return "degenerate";
    case StopReason::SolverFailure: return "solver_failure";
  }
  return "unknown";
}

struct Emitter {
  const OutputConfig& output;
  bool dir_ready = false;

  bool wants(const std::string& fmt) const { return output.formats.count(fmt) > 0; }

  std::filesystem::path file(const std::string& name) {
    if (!dir_ready) {
      std::filesystem::create_directories(output.directory);
      dir_ready = true;
    }
    return output.directory / name;
  }
};

std::vector<double> boundary_thetas(const Mesh& mesh) {
  std::vector<double> thetas;
  thetas.reserve(mesh.boundary_vertices().size());
  for (int v : mesh.boundary_vertices()) {
    const Vec2 p = mesh.vertices()[v];
    thetas.push_back(std::atan2(p.y, p.x));
  }
  return thetas;
}

double energy_identity_residual(const Mesh& mesh, const BoundaryLoad& load,
                                const StateSolution& state) {
  const double j = cost_J(mesh, load, state);
  const double e = energy(mesh, state);
  return std::abs(j - e) / std::max(std::abs(e), 1e-300);
}

void emit_state_files(Emitter& emitter, const Mesh& mesh,
                      const BoundaryLoad& load, const StateSolution& state) {
  if (emitter.wants("csv")) {
    io::write_solution_csv(emitter.file("solution.csv"), mesh, state.nodal_u);
    io::write_boundary_csv(emitter.file("boundary.csv"), mesh, load,
                           state.nodal_u);
  }
  if (emitter.wants("vtk"))
    io::write_vtk(emitter.file("solution.vtk"), mesh, state.nodal_u);
  if (emitter.wants("svg")) {
    io::PlotSeries fu{"f(s)", {}}, uu{"u(s)", {}};
    const auto trace = mesh.boundary_trace(state.nodal_u);
    for (const BoundaryEdge& e : mesh.boundary_edges()) {
      for (double s : {e.s_begin, e.s_begin + 0.5 * e.length}) {
        fu.points.emplace_back(s, load.value_at(mesh, s));
        uu.points.emplace_back(s, mesh.trace_at(trace, s));
      }
    }
    const io::PlotSeries series[] = {fu, uu};
    io::write_svg_plot(emitter.file("boundary.svg"), "boundary load and state",
                       series);
  }
}

void emit_trace_files(Emitter& emitter, const AscentTrace& trace) {
  if (emitter.wants("csv")) {
    std::vector<std::vector<double>> rows;
    for (const AscentRecord& r : trace.records)
      rows.push_back({static_cast<double>(r.iter), r.j_value, r.threshold,
                      r.measure, r.residual});
    io::write_table_csv(emitter.file("trace.csv"),
                        "iter,J,threshold_s,measure,residual", rows);
  }
  if (emitter.wants("svg")) {
    io::PlotSeries series{"J", {}};
    for (const AscentRecord& r : trace.records)
      series.points.emplace_back(static_cast<double>(r.iter), r.j_value);
    io::write_svg_plot(emitter.file("trace.svg"), "cost along the ascent",
                       std::span(&series, 1));
  }
}

ordered_json trace_json(const AscentTrace& trace) {
  ordered_json j;
  j["iterations"] = trace.records.empty() ? 0 : trace.records.back().iter;
  j["terminated_reason"] = reason_name(trace.reason);
  return j;
}

void finish_report(Emitter& emitter, ordered_json& report,
                   std::chrono::steady_clock::time_point started) {
  using namespace std::chrono;
  const double seconds =
      duration<double>(steady_clock::now() - started).count();
  // wall time goes to stderr only: report files must be byte-stable for a
  // fixed seed
  report["wall_time_s"] = nullptr;
  if (emitter.wants("json")) {
    std::ofstream out(emitter.file("report.json"), std::ios::binary);
    out << report.dump(2) << "\n";
  }
  std::cout << report.dump() << std::endl;
  std::cerr << "wall_time_s=" << seconds << "\n";
}

void run_solve(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (!config.problem.load)
    throw ConfigError("solve requires problem.load");
  const Mesh mesh = build_mesh(config.domain);
  const BoundaryLoad load = resolve_load(mesh, *config.problem.load);
  SolverConfig solver = config.solver;
  solver.p = config.problem.p;
  const StateSolution state = solve_state(mesh, load, solver);
  if (!state.converged)
    throw SolveError("state solver did not converge");

  Emitter emitter{config.output};
  emit_state_files(emitter, mesh, load, state);

  ordered_json report;
  report["command"] = "solve";
  report["J"] = cost_J(mesh, load, state);
  report["energy"] = state.energy_value;
  report["newton_iterations"] = state.newton_iterations;
  report["residual_norm"] = state.residual_norm;
  report["residuals"] = {
      {"energy_identity", energy_identity_residual(mesh, load, state)}};
  finish_report(emitter, report, started);
}

void run_optimize(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const Mesh mesh = build_mesh(config.domain);
  SolverConfig solver = config.solver;
  solver.p = config.problem.p;
  Emitter emitter{config.output};
  ordered_json report;
  report["command"] = "optimize";
  report["class"] = config.problem.load_class;

  if (config.problem.load_class == "linfty") {
    if (!config.problem.surface_measure)
      throw ConfigError("class linfty requires problem.A");
    const double measure = *config.problem.surface_measure;
    if (!(measure > 0.0) || !(measure < mesh.perimeter()))
      throw ConfigError("problem.A must lie strictly between 0 and the perimeter");
    const MultistartOutcome outcome =
        optimize_linfty(mesh, measure, solver, config.ascent);
    const BathtubOutcome& best = outcome.runs[outcome.best];
    if (best.trace.reason == StopReason::SolverFailure)
      throw SolveError("state solver did not converge during the ascent");
    const BoundaryLoad load = BoundaryLoad::indicator(best.region);

    emit_state_files(emitter, mesh, load, best.state);
    emit_trace_files(emitter, best.trace);
    if (emitter.wants("csv"))
      io::write_region_csv(emitter.file("region.csv"), best.region);

    report["J_best"] = best.j_value;
    report["multistart"] = static_cast<int>(outcome.runs.size());
    report["best_run"] = outcome.best;
    report["trace"] = trace_json(best.trace);
    ordered_json intervals = ordered_json::array();
    for (const ArcInterval& iv : best.region.intervals())
      intervals.push_back({iv.s_begin, iv.s_end});
    report["region"] = {{"intervals", intervals},
                        {"measure", best.region.measure()}};
    const auto res = optimality_residual(mesh, best.state, best.region);
    report["residuals"] = {
        {"energy_identity", energy_identity_residual(mesh, load, best.state)},
        {"optimality", res.value}};
  } else if (config.problem.load_class == "rearrangement") {
    if (!config.problem.f0_file)
      throw ConfigError("class rearrangement requires problem.f0_file");
    const std::vector<double> f0 = io::read_edge_load_csv(*config.problem.f0_file);
    const RearrangementMultistart outcome =
        optimize_rearrangement(mesh, f0, solver, config.ascent);
    const RearrangementOutcome& best = outcome.runs[outcome.best];
    if (best.trace.reason == StopReason::SolverFailure)
      throw SolveError("state solver did not converge during the ascent");
    const BoundaryLoad load = BoundaryLoad::per_edge(best.best_f);

    emit_state_files(emitter, mesh, load, best.state);
    emit_trace_files(emitter, best.trace);
    if (emitter.wants("csv"))
      io::write_edge_load_csv(emitter.file("load.csv"), best.best_f);

    report["J_best"] = best.j_value;
    report["multistart"] = static_cast<int>(outcome.runs.size());
    report["best_run"] = outcome.best;
    report["trace"] = trace_json(best.trace);
    report["residuals"] = {
        {"energy_identity", energy_identity_residual(mesh, load, best.state)}};
  } else if (config.problem.load_class == "lq") {
    if (!config.problem.q) throw ConfigError("class lq requires problem.q");
    const LqExtremal extremal =
        trace_extremal(mesh, *config.problem.q, config.problem.p, solver);
    const LqLoadInfo info = lq_optimal_load(mesh, extremal, config.problem.p);
    const StateSolution state = solve_state(mesh, info.load, solver);
    if (!state.converged) throw SolveError("state solver did not converge");
    const double achieved = cost_J(mesh, info.load, state);

    emit_state_files(emitter, mesh, info.load, state);
    if (emitter.wants("csv"))
      io::write_extremal_csv(emitter.file("extremal.csv"), extremal.v);

    report["J_best"] = achieved;
    report["S"] = extremal.s_value;
    report["predicted_J"] = info.predicted_j;
    report["extremal_iterations"] = extremal.iterations;
    report["load_q_norm"] = info.load_q_norm;
    report["residuals"] = {
        {"energy_identity", energy_identity_residual(mesh, info.load, state)},
        {"predicted_vs_achieved",
         std::abs(achieved - info.predicted_j) /
             std::max(info.predicted_j, 1e-300)}};
  } else {
    throw ConfigError("problem.class must be rearrangement|lq|linfty");
  }
  finish_report(emitter, report, started);
}

void run_check_derivative(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (config.domain.kind != DomainSpec::Kind::Disk)
    throw ConfigError("check-derivative runs are restricted to disk domains");
  if (config.problem.region.empty())
    throw ConfigError("check-derivative requires problem.region");
  if (config.problem.steps.empty())
    throw ConfigError("check-derivative requires problem.steps");
  const Mesh mesh = build_mesh(config.domain);
  const BoundaryRegion region =
      BoundaryRegion::from_intervals(mesh.perimeter(), config.problem.region);
  const TangentialVelocity velocity{config.problem.velocity};
  SolverConfig solver = config.solver;
  solver.p = config.problem.p;
  const DerivativeReport result = fd_check(mesh, region, velocity,
                                           config.problem.p, solver,
                                           config.problem.steps);

  Emitter emitter{config.output};
  if (emitter.wants("csv")) {
    std::vector<std::vector<double>> rows;
    for (const DerivativeEntry& e : result.entries)
      rows.push_back({e.t, e.fd_dj, result.formula_dj, e.fd_da,
                      result.formula_da});
    io::write_table_csv(emitter.file("derivative.csv"),
                        "t,fd_dJ,formula_dJ,fd_dA,formula_dA", rows);
  }
  if (emitter.wants("svg")) {
    io::PlotSeries diff{"|fd_dJ - formula|", {}};
    for (const DerivativeEntry& e : result.entries)
      diff.points.emplace_back(e.t, std::abs(e.fd_dj - result.formula_dj));
    io::write_svg_plot(emitter.file("derivative.svg"),
                       "finite differences vs endpoint formula",
                       std::span(&diff, 1), true, true);
  }

  ordered_json report;
  report["command"] = "check-derivative";
  report["formula_dJ"] = result.formula_dj;
  report["formula_dA"] = result.formula_da;
  report["J0"] = result.j_zero;
  report["observed_order"] = result.observed_order;
  report["order_meaningful"] = result.order_meaningful;
  ordered_json entries = ordered_json::array();
  for (const DerivativeEntry& e : result.entries) {
    entries.push_back({{"t", e.t},
                       {"fd_dJ", e.fd_dj},
                       {"fd_dA", e.fd_da},
                       {"solver_ok", e.solver_ok}});
  }
  report["entries"] = entries;
  finish_report(emitter, report, started);
}

void run_oracle(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (!config.problem.oracle) throw ConfigError("oracle requires problem.oracle");
  if (config.domain.kind != DomainSpec::Kind::Disk ||
      std::abs(config.domain.size - 1.0) > 1e-12)
    throw ConfigError("the oracle works on the unit disk");
  const OracleSpec& spec = *config.problem.oracle;

  Emitter emitter{config.output};
  ordered_json report;
  report["command"] = "oracle";

  if (spec.op == OracleSpec::Op::BestArc) {
    const oracle::ArcSearchResult result =
        oracle::best_arc_search(spec.measure, spec.k_configs, config.ascent.seed);
    if (emitter.wants("csv")) {
      std::ofstream out(emitter.file("jtable.csv"), std::ios::binary);
      out << "config_id,description,J\n";
      for (std::size_t k = 0; k < result.table.size(); ++k) {
        out << k << ',' << result.table[k].description << ','
            << io::format_double(result.table[k].j_value) << "\n";
      }
    }
    report["op"] = "best_arc";
    report["best_index"] = result.best_index;
    report["best_description"] = result.table[result.best_index].description;
    report["best_J"] = result.table[result.best_index].j_value;
    report["single_arc_J"] = result.table[0].j_value;
  } else {
    oracle::FourierLoad load;
    if (spec.op == OracleSpec::Op::SolveArc) {
      const BoundaryRegion region = BoundaryRegion::from_intervals(
          2.0 * std::numbers::pi, spec.intervals);
      load = oracle::arc_fourier(region, spec.n_modes);
      report["op"] = "solve_arc";
    } else {
      load.a0 = spec.a0;
      load.a = spec.cos_coeffs;
      load.b = spec.sin_coeffs;
      report["op"] = "solve_fourier";
    }
    const oracle::OracleSolution sol = oracle::solve_disk(load);
    report["J"] = sol.j_value;
    report["truncation_bound"] = sol.truncation_bound;
    if (emitter.wants("csv")) {
      std::vector<std::vector<double>> rows;
      rows.push_back({0.0, load.a0, 0.0, sol.u0, 0.0});
      for (int n = 1; n <= load.n_modes(); ++n)
        rows.push_back({static_cast<double>(n), load.a[n - 1], load.b[n - 1],
                        sol.u_cos[n - 1], sol.u_sin[n - 1]});
      io::write_table_csv(emitter.file("modes.csv"), "n,f_cos,f_sin,u_cos,u_sin",
                          rows);
    }
  }
  finish_report(emitter, report, started);
}

void run_compare(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (config.problem.p != 2.0)
    throw ConfigError("compare requires p = 2 (the oracle regime)");
  if (config.domain.kind != DomainSpec::Kind::Disk ||
      std::abs(config.domain.size - 1.0) > 1e-12)
    throw ConfigError("compare works on the unit disk");
  if (!config.problem.load || config.problem.load->type != LoadSpec::Type::Fourier)
    throw ConfigError("compare requires a fourier load");

  const LoadSpec& spec = *config.problem.load;
  oracle::FourierLoad fourier;
  fourier.a0 = spec.a0;
  fourier.a = spec.cos_coeffs;
  fourier.b = spec.sin_coeffs;
  const double j_oracle = oracle::solve_disk(fourier).j_value;

  SolverConfig solver = config.solver;
  solver.p = 2.0;

  std::vector<std::vector<double>> rows;
  for (int r = 0; r <= config.domain.refinements; ++r) {
    DomainSpec domain = config.domain;
    domain.refinements = r;
    const Mesh mesh = build_mesh(domain);
    const BoundaryLoad load = resolve_load(mesh, spec);
    const StateSolution state = solve_state(mesh, load, solver);
    if (!state.converged) throw SolveError("state solver did not converge");
    const double j_fem = cost_J(mesh, load, state);
    rows.push_back({static_cast<double>(r), j_fem, j_oracle,
                    std::abs(j_fem - j_oracle)});
  }

  Emitter emitter{config.output};
  if (emitter.wants("csv"))
    io::write_table_csv(emitter.file("convergence.csv"),
                        "n_refine,J_fem,J_oracle,abs_err", rows);
  if (emitter.wants("svg")) {
    io::PlotSeries err{"|J_fem - J_oracle|", {}};
    for (const auto& row : rows) err.points.emplace_back(row[0] + 1.0, row[3]);
    io::write_svg_plot(emitter.file("convergence.svg"),
                       "FEM vs oracle under refinement", std::span(&err, 1),
                       false, true);
  }

  ordered_json report;
  report["command"] = "compare";
  report["J_oracle"] = j_oracle;
  ordered_json table = ordered_json::array();
  for (const auto& row : rows)
    table.push_back({{"n_refine", static_cast<int>(row[0])},
                     {"J_fem", row[1]},
                     {"abs_err", row[3]}});
  report["levels"] = table;
  finish_report(emitter, report, started);
}

}  // namespace

BoundaryLoad resolve_load(const Mesh& mesh, const LoadSpec& spec) {
  switch (spec.type) {
    case LoadSpec::Type::Constant:
      return make_constant_load(mesh, spec.value);
    case LoadSpec::Type::Edges:
      return BoundaryLoad::per_edge(io::read_edge_load_csv(spec.file));
    case LoadSpec::Type::Nodal:
      return BoundaryLoad::nodal_trace(io::read_edge_load_csv(spec.file));
    case LoadSpec::Type::Region:
      return BoundaryLoad::indicator(
          BoundaryRegion::from_intervals(mesh.perimeter(), spec.intervals),
          spec.amplitude);
    case LoadSpec::Type::Fourier: {
      if (!mesh.circle_radius())
        throw ConfigError("fourier loads need a disk domain");
      std::vector<double> values;
      values.reserve(mesh.boundary_vertices().size());
      for (double theta : boundary_thetas(mesh)) {
        double v = spec.a0;
        for (std::size_t k = 0; k < spec.cos_coeffs.size(); ++k) {
          const double n = static_cast<double>(k + 1);
          v += spec.cos_coeffs[k] * std::cos(n * theta) +
               spec.sin_coeffs[k] * std::sin(n * theta);
        }
        values.push_back(v);
      }
      return BoundaryLoad::nodal_trace(std::move(values));
    }
  }
  throw ConfigError("unhandled load type");
}

void run_command(const std::string& command, const RunConfig& config) {
  if (command == "solve") {
    run_solve(config);
  } else if (command == "optimize") {
    run_optimize(config);
  } else if (command == "check-derivative") {
    run_check_derivative(config);
  } else if (command == "oracle") {
    run_oracle(config);
  } else if (command == "compare") {
    run_compare(config);
  } else {
    throw ConfigError("unknown command: " + command);
  }
}

}  // namespace membrane
