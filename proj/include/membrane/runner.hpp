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

#include <string>

#include "membrane/config.hpp"

namespace membrane {

/// Executes one subcommand (solve, optimize, check-derivative, oracle,
/// compare): runs the workflow, writes the requested outputs, prints a
/// one-line JSON summary to stdout and timing to stderr. Throws
/// ConfigError / SolveError; the CLI maps exceptions to exit codes.
void run_command(const std::string& command, const RunConfig& config);

/// Resolves a config-file load description against a mesh.
BoundaryLoad resolve_load(const Mesh& mesh, const LoadSpec& spec);

}  // namespace membrane
