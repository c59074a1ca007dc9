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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fqh/heat.hpp"
#include "fqh/problem.hpp"
#include "fqh/sampler.hpp"

namespace fqh {

/// Process exit codes of the `fqh` tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitValidation = 2,
  kExitInvariant = 3,
};

/// Resolves `default`, `file` (the problem's own basis) or `bloch:THETA,PHI`
/// (Bloch rotation of the first two-dimensional cluster of the canonical
/// eigenbasis). Throws InvalidArgument / NoDegenerateBlock.
StateEigenbasis resolve_basis(const Problem& problem, const std::string& choice);

nlohmann::json report_to_json(const FqhReport& report, const Problem& problem);

struct SweepRow {
  double theta = 0.0;
  double phi = 0.0;
  double var_q = 0.0;
  double var_s = 0.0;
  double var_diff = 0.0;
};

/// theta_i = pi i / theta_steps, phi_j = 2 pi j / phi_steps; rows theta-major.
/// Grid points are evaluated on `threads` workers (0: hardware concurrency);
/// the output order does not depend on it. Throws NoDegenerateBlock.
std::vector<SweepRow> run_sweep(const Problem& problem, std::size_t theta_steps, std::size_t phi_steps,
                                unsigned threads = 0);

/// Header `theta,phi,var_q,var_s,var_diff`, %.17g values, LF line endings.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct SampleOptions {
  Level level = Level::PartialCG;
  std::size_t n = 100000;
  std::uint64_t seed = 42;
  bool sequential = false;
  int max_order = 4;
  std::string basis = "default";
};

/// Empirical versus analytic probabilities and moments of one sampling run.
nlohmann::json sample_report(const Problem& problem, const SampleOptions& options);

/// Entry point of the `fqh` executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fqh
