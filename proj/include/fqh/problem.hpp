// Copyright 2026 The fqh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fqh/linalg.hpp"

namespace fqh {

/// Inputs of one analysis: a Hamiltonian, an initial state and optionally an
/// eigenbasis of the state.
///
/// File format (JSON, complex numbers as [re, im]; plain numbers are real):
///
///   {
///     "dim": 2,
///     "hamiltonian": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
///     "rho":         [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]],
///     "basis":       [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],       (optional)
///     "tolerances":  {"hermiticity": 1e-10, "trace": 1e-9,        (optional)
///                     "psd": 1e-9, "cluster_rel": 1e-8,
///                     "prob_floor": 1e-12}
///   }
///
/// `basis` is a list of vectors, not matrix columns.
struct Problem {
  std::string name;
  HermitianOperator hamiltonian;
  DensityState rho;
  std::optional<std::vector<ComplexVector>> basis;
};

/// Throws ParseError on malformed JSON shape, and the linalg validation errors
/// (NonHermitian, InvalidState, ...) on invalid operators.
Problem parse_problem(const nlohmann::json& doc, const Tolerances& base, const std::string& name = "input");
Problem load_problem(const std::filesystem::path& path, const Tolerances& base);
nlohmann::json problem_to_json(const Problem& problem);

/// The degenerate two-qubit state and four-level Hamiltonian, with
/// |1> = |psi^+_{pi/2,0}> and |0> = |psi^-_{pi/2,0}> built from the Bloch
/// parameterization over the {|+>, |->} = {(1,0), (0,1)} frame.
Problem two_qubit_example(const Tolerances& tol = {});

/// Looks up a built-in fixture by name; throws InvalidArgument.
Problem builtin_example(const std::string& name, const Tolerances& tol = {});

}  // namespace fqh
