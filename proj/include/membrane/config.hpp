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
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "membrane/fem.hpp"
#include "membrane/geometry.hpp"
#include "membrane/optimizers.hpp"

namespace membrane {

/// A load description from a config file; resolved against a mesh later.
struct LoadSpec {
  enum class Type { Constant, Edges, Region, Nodal, Fourier };
  Type type = Type::Constant;
  double value = 0.0;                 // constant
  std::filesystem::path file;        // edges / nodal CSV
  std::vector<std::pair<double, double>> intervals;  // region
  double amplitude = 1.0;            // region
  double a0 = 0.0;                   // fourier
  std::vector<double> cos_coeffs, sin_coeffs;
};

struct OracleSpec {
  enum class Op { SolveFourier, SolveArc, BestArc };
  Op op = Op::SolveFourier;
  double a0 = 0.0;
  std::vector<double> cos_coeffs, sin_coeffs;
  std::vector<std::pair<double, double>> intervals;
  double measure = 0.0;
  int k_configs = 50;
  int n_modes = 64;
};

struct ProblemConfig {
  double p = 2.0;
  std::string load_class;  // rearrangement | lq | linfty (optimize)
  std::optional<double> q;
  std::optional<double> surface_measure;  // A
  std::optional<std::filesystem::path> f0_file;
  std::optional<LoadSpec> load;  // solve / compare
  std::vector<std::pair<double, double>> region;  // check-derivative
  std::vector<double> velocity;
  std::vector<double> steps;
  std::optional<OracleSpec> oracle;
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  std::set<std::string> formats = {"json"};  // subset of csv vtk svg json
};

struct RunConfig {
  DomainSpec domain;
  ProblemConfig problem;
  SolverConfig solver;
  AscentConfig ascent;
  OutputConfig output;
};

/// Parses the JSON config with an exact schema: unknown keys anywhere are
/// rejected (ConfigError), as are wrong types and out-of-range values.
RunConfig parse_config_file(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace membrane
