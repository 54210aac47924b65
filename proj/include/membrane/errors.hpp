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

#include <stdexcept>

namespace membrane {

/// Configuration / precondition violation. The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument outside its mathematical domain (negative measure, A > P, ...).
struct DomainError : ConfigError {
  using ConfigError::ConfigError;
};

/// Input violates an admissible-class requirement (e.g. non-uniform
/// boundary partition for the rearrangement class).
struct ClassViolationError : DomainError {
  using DomainError::DomainError;
};

/// A region perturbation large enough to cross or merge endpoints.
struct PerturbationTooLarge : DomainError {
  using DomainError::DomainError;
};

/// Solver failure (singular system, iteration cap). CLI exit code 2.
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace membrane
