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

#include "membrane/config.hpp"

#include <fstream>

#include <json.hpp>

namespace membrane {

namespace {

using nlohmann::json;

/// Wraps a JSON object; every key must be consumed exactly once and
/// leftovers are reported as configuration errors.
class StrictObject {
 public:
  StrictObject(const json& j, std::string where)
      : node_(j), where_(std::move(where)) {
    if (!node_.is_object())
      throw ConfigError(where_ + " must be a JSON object");
  }

  ~StrictObject() = default;

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* j = get(key);
    if (!j) throw ConfigError(where_ + " is missing required key '" + key + "'");
    return *j;
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key()))
        throw ConfigError("unknown key '" + it.key() + "' in " + where_);
    }
  }

  const std::string& where() const { return where_; }

 private:
  const json& node_;
  std::string where_;
  std::set<std::string> seen_;
};

double as_number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ConfigError(what + " must be an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& what) {
  if (!j.is_string()) throw ConfigError(what + " must be a string");
  return j.get<std::string>();
}

std::vector<double> as_number_array(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(as_number(e, what + " entry"));
  return out;
}

std::vector<std::pair<double, double>> as_interval_array(
    const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of pairs");
  std::vector<std::pair<double, double>> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2)
      throw ConfigError(what + " entries must be [s_begin, s_end] pairs");
    out.emplace_back(as_number(e[0], what), as_number(e[1], what));
  }
  return out;
}

DomainSpec parse_domain(const json& j) {
  StrictObject obj(j, "domain");
  DomainSpec spec;
  const std::string kind = as_string(obj.require("kind"), "domain.kind");
  if (kind == "disk") {
    spec.kind = DomainSpec::Kind::Disk;
  } else if (kind == "square") {
    spec.kind = DomainSpec::Kind::Square;
  } else {
    throw ConfigError("domain.kind must be 'disk' or 'square'");
  }
  spec.size = as_number(obj.require("size"), "domain.size");
  spec.n_boundary = as_int(obj.require("n_boundary"), "domain.n_boundary");
  if (const json* r = obj.get("refinements"))
    spec.refinements = as_int(*r, "domain.refinements");
  obj.finish();
  spec.validate();
  return spec;
}

LoadSpec parse_load(const json& j) {
  StrictObject obj(j, "problem.load");
  LoadSpec load;
  const std::string type = as_string(obj.require("type"), "load.type");
  if (type == "constant") {
    load.type = LoadSpec::Type::Constant;
    load.value = as_number(obj.require("value"), "load.value");
  } else if (type == "edges") {
    load.type = LoadSpec::Type::Edges;
    load.file = as_string(obj.require("file"), "load.file");
  } else if (type == "nodal") {
    load.type = LoadSpec::Type::Nodal;
    load.file = as_string(obj.require("file"), "load.file");
  } else if (type == "region") {
    load.type = LoadSpec::Type::Region;
    load.intervals = as_interval_array(obj.require("intervals"), "load.intervals");
    if (const json* a = obj.get("amplitude"))
      load.amplitude = as_number(*a, "load.amplitude");
  } else if (type == "fourier") {
    load.type = LoadSpec::Type::Fourier;
    if (const json* a0 = obj.get("a0")) load.a0 = as_number(*a0, "load.a0");
    if (const json* c = obj.get("cos")) load.cos_coeffs = as_number_array(*c, "load.cos");
    if (const json* s = obj.get("sin")) load.sin_coeffs = as_number_array(*s, "load.sin");
    load.cos_coeffs.resize(std::max(load.cos_coeffs.size(), load.sin_coeffs.size()), 0.0);
    load.sin_coeffs.resize(load.cos_coeffs.size(), 0.0);
  } else {
    throw ConfigError("load.type must be constant|edges|nodal|region|fourier");
  }
  obj.finish();
  return load;
}

OracleSpec parse_oracle(const json& j) {
  StrictObject obj(j, "problem.oracle");
  OracleSpec oracle;
  const std::string op = as_string(obj.require("op"), "oracle.op");
  if (op == "solve_fourier") {
    oracle.op = OracleSpec::Op::SolveFourier;
    if (const json* a0 = obj.get("a0")) oracle.a0 = as_number(*a0, "oracle.a0");
    if (const json* c = obj.get("cos"))
      oracle.cos_coeffs = as_number_array(*c, "oracle.cos");
    if (const json* s = obj.get("sin"))
      oracle.sin_coeffs = as_number_array(*s, "oracle.sin");
    oracle.cos_coeffs.resize(
        std::max(oracle.cos_coeffs.size(), oracle.sin_coeffs.size()), 0.0);
    oracle.sin_coeffs.resize(oracle.cos_coeffs.size(), 0.0);
  } else if (op == "solve_arc") {
    oracle.op = OracleSpec::Op::SolveArc;
    oracle.intervals =
        as_interval_array(obj.require("intervals"), "oracle.intervals");
  } else if (op == "best_arc") {
    oracle.op = OracleSpec::Op::BestArc;
    oracle.measure = as_number(obj.require("A"), "oracle.A");
    if (const json* k = obj.get("k_configs"))
      oracle.k_configs = as_int(*k, "oracle.k_configs");
  } else {
    throw ConfigError("oracle.op must be solve_fourier|solve_arc|best_arc");
  }
  if (const json* m = obj.get("n_modes"))
    oracle.n_modes = as_int(*m, "oracle.n_modes");
  obj.finish();
  return oracle;
}

ProblemConfig parse_problem(const json& j) {
  StrictObject obj(j, "problem");
  ProblemConfig problem;
  if (const json* p = obj.get("p")) problem.p = as_number(*p, "problem.p");
  if (const json* c = obj.get("class"))
    problem.load_class = as_string(*c, "problem.class");
  if (const json* q = obj.get("q")) problem.q = as_number(*q, "problem.q");
  if (const json* a = obj.get("A"))
    problem.surface_measure = as_number(*a, "problem.A");
  if (const json* f = obj.get("f0_file"))
    problem.f0_file = as_string(*f, "problem.f0_file");
  if (const json* l = obj.get("load")) problem.load = parse_load(*l);
  if (const json* r = obj.get("region"))
    problem.region = as_interval_array(*r, "problem.region");
  if (const json* v = obj.get("velocity"))
    problem.velocity = as_number_array(*v, "problem.velocity");
  if (const json* s = obj.get("steps"))
    problem.steps = as_number_array(*s, "problem.steps");
  if (const json* o = obj.get("oracle")) problem.oracle = parse_oracle(*o);
  obj.finish();
  if (!(problem.p > 1.0)) throw ConfigError("problem.p must exceed 1");
  return problem;
}

SolverConfig parse_solver(const json& j) {
  StrictObject obj(j, "solver");
  SolverConfig solver;
  if (const json* v = obj.get("epsilon_start"))
    solver.epsilon_start = as_number(*v, "solver.epsilon_start");
  if (const json* v = obj.get("epsilon_min"))
    solver.epsilon_min = as_number(*v, "solver.epsilon_min");
  if (const json* v = obj.get("continuation_factor"))
    solver.continuation_factor = as_number(*v, "solver.continuation_factor");
  if (const json* v = obj.get("newton_tol"))
    solver.newton_tol = as_number(*v, "solver.newton_tol");
  if (const json* v = obj.get("max_newton"))
    solver.max_newton = as_int(*v, "solver.max_newton");
  if (const json* v = obj.get("line_search_beta"))
    solver.line_search_beta = as_number(*v, "solver.line_search_beta");
  if (const json* v = obj.get("line_search_c"))
    solver.line_search_c = as_number(*v, "solver.line_search_c");
  if (const json* v = obj.get("linear_rtol"))
    solver.linear_rtol = as_number(*v, "solver.linear_rtol");
  obj.finish();
  return solver;
}

AscentConfig parse_ascent(const json& j) {
  StrictObject obj(j, "ascent");
  AscentConfig ascent;
  if (const json* v = obj.get("ascent_tol"))
    ascent.tol = as_number(*v, "ascent.ascent_tol");
  if (const json* v = obj.get("max_ascent"))
    ascent.max_iters = as_int(*v, "ascent.max_ascent");
  if (const json* v = obj.get("multistart"))
    ascent.multistart = as_int(*v, "ascent.multistart");
  if (const json* v = obj.get("seed")) {
    if (!v->is_number_unsigned() && !v->is_number_integer())
      throw ConfigError("ascent.seed must be an integer");
    ascent.seed = v->get<std::uint64_t>();
  }
  obj.finish();
  if (!(ascent.tol > 0.0)) throw ConfigError("ascent.ascent_tol must be positive");
  if (ascent.max_iters < 1) throw ConfigError("ascent.max_ascent must be >= 1");
  if (ascent.multistart < 1) throw ConfigError("ascent.multistart must be >= 1");
  return ascent;
}

OutputConfig parse_output(const json& j) {
  StrictObject obj(j, "output");
  OutputConfig output;
  if (const json* d = obj.get("directory"))
    output.directory = as_string(*d, "output.directory");
  if (const json* f = obj.get("formats")) {
    if (!f->is_array()) throw ConfigError("output.formats must be an array");
    output.formats.clear();
    for (const auto& e : *f) {
      const std::string fmt = as_string(e, "output.formats entry");
      if (fmt != "csv" && fmt != "vtk" && fmt != "svg" && fmt != "json")
        throw ConfigError("unknown output format '" + fmt + "'");
      output.formats.insert(fmt);
    }
  }
  obj.finish();
  return output;
}

RunConfig parse_config_json(const json& root) {
  StrictObject obj(root, "config");
  RunConfig config;
  config.domain = parse_domain(obj.require("domain"));
  config.problem = parse_problem(obj.require("problem"));
  if (const json* s = obj.get("solver")) config.solver = parse_solver(*s);
  if (const json* a = obj.get("ascent")) config.ascent = parse_ascent(*a);
  if (const json* o = obj.get("output")) config.output = parse_output(*o);
  obj.finish();
  config.solver.validate();
  return config;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  return parse_config_json(root);
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

}  // namespace membrane
