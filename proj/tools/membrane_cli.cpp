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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "membrane/runner.hpp"

// Exit codes: 0 success, 1 configuration error, 2 solver non-convergence,
// 3 internal error.

int main(int argc, char** argv) {
  CLI::App app{"nonlinear membrane boundary-load optimization"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  const char* names[] = {"solve", "optimize", "check-derivative", "oracle",
                         "compare"};
  const char* blurbs[] = {
      "solve the state equation for a given load",
      "maximize J over an admissible load class",
      "validate the shape derivative against finite differences",
      "evaluate the disk oracle",
      "FEM vs oracle refinement study"};
  for (int k = 0; k < 5; ++k) {
    CLI::App* sub = app.add_subcommand(names[k], blurbs[k]);
    sub->add_option("--config", config_path, "JSON run configuration")
        ->required();
    sub->add_option("--out", out_dir, "override output.directory");
    sub->add_option("--seed", seed, "override ascent.seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    membrane::RunConfig config = membrane::parse_config_file(config_path);
    if (!out_dir.empty()) config.output.directory = out_dir;
    if (seed) config.ascent.seed = *seed;
    membrane::run_command(app.get_subcommands().front()->get_name(), config);
    return 0;
  } catch (const membrane::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const membrane::SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
