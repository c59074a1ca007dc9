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

// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fqh/commands.hpp"
#include "fqh/heat.hpp"
#include "fqh/problem.hpp"
#include "test_support.hpp"

using namespace fqh;
using fqh::fixtures::Rng;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool passed = false;
  std::string detail;
};

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fqh");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

const Tolerances kLoose{.hermiticity = 1e-9};

// The 500-instance suite shared by AC3 and AC4. Half of the states are
// degenerate; a third of the Hamiltonians are.
struct Case {
  fixtures::Instance inst;
  FqhReport report;
};

const std::vector<Case>& identity_suite() {
  static const std::vector<Case> cases = [] {
    std::vector<Case> out;
    Rng rng(20260418);
    for (int trial = 0; trial < 500; ++trial) {
      const auto n = static_cast<std::size_t>(rng.integer(2, 8));
      fixtures::Instance inst = fixtures::random_instance(rng, n, trial % 2 == 0, trial % 3 == 0);
      const DensityState rho(inst.rho, kLoose);
      const HermitianOperator h(inst.hamiltonian, kLoose);
      FqhReport report = analyze(rho, h, default_eigenbasis(rho), 4);
      out.push_back({std::move(inst), std::move(report)});
    }
    return out;
  }();
  return cases;
}

Verdict ac1() {
  const CliRun r = cli({"analyze", "--example", "two-qubit"});
  if (r.code != kExitOk) return {false, "exit code " + std::to_string(r.code) + ": " + r.err};
  const double var_s = json::parse(r.out)["variances"]["partial"].get<double>();
  return {std::abs(var_s - 4.6) <= 1e-9, fmt("var_s = %.17g", var_s)};
}

Verdict ac2() {
  const CliRun r = cli({"sweep", "--example", "two-qubit", "--theta-steps", "64", "--phi-steps", "64"});
  if (r.code != kExitOk) return {false, "exit code " + std::to_string(r.code) + ": " + r.err};
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  if (line != "theta,phi,var_q,var_s,var_diff") return {false, "bad header"};
  std::size_t rows = 0;
  double min_gap = INFINITY, gap_a = INFINITY, gap_b = INFINITY;
  double vs_min = INFINITY, vs_max = -INFINITY;
  while (std::getline(in, line)) {
    double theta = 0, phi = 0, vq = 0, vs = 0, vd = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &theta, &phi, &vq, &vs, &vd) != 5) {
      return {false, "unparsable row: " + line};
    }
    ++rows;
    min_gap = std::min(min_gap, vq - vs);
    vs_min = std::min(vs_min, vs);
    vs_max = std::max(vs_max, vs);
    if (theta == kPi / 2 && phi == 0.0) gap_a = vq - vs;
    if (theta == kPi / 2 && phi == kPi) gap_b = vq - vs;
  }
  const bool ok = rows == 64 * 64 && min_gap >= -1e-9 && gap_a < 1e-6 && gap_b < 1e-6 && vs_max - vs_min <= 1e-9;
  return {ok, std::to_string(rows) + " rows, " +
                  fmt("min(var_q - var_s) = %.3g, gap(pi/2,0) = %.3g, gap(pi/2,pi) = %.3g", min_gap, gap_a, gap_b)};
}

Verdict ac3() {
  double worst_first = 0.0, worst_identity = 0.0, worst_order = -INFINITY;
  for (const auto& c : identity_suite()) {
    const FqhReport& r = c.report;
    worst_first = std::max({worst_first, std::abs(r.moments_eigenstate[0]), std::abs(r.moments_partial[0]),
                            std::abs(r.moments_full[0])});
    worst_identity = std::max(worst_identity, std::abs(r.var_q - r.skew_bound_eigenstate));
    worst_order = std::max({worst_order, r.var_b - r.var_s, r.var_s - r.var_q});
  }
  const bool ok = worst_first <= 1e-9 && worst_identity <= 1e-8 && worst_order <= 1e-9;
  return {ok, fmt("max |first moment| = %.3g, max |var_q - skew sum| = %.3g, max ordering violation = %.3g",
                  worst_first, worst_identity, worst_order)};
}

Verdict ac4() {
  double worst = 0.0;
  for (const auto& c : identity_suite()) {
    const FqhReport& r = c.report;
    const double norm = c.inst.hamiltonian.frobenius_norm();
    for (std::size_t k = 0; k < 4; ++k) {
      const double scale = 1.0 + std::pow(norm, static_cast<double>(k + 1));
      worst = std::max({worst, std::abs(r.moments_eigenstate[k] - r.trace_moments_eigenstate[k]) / scale,
                        std::abs(r.moments_partial[k] - r.trace_moments_partial[k]) / scale});
    }
  }
  return {worst <= 1e-8, fmt("max |enumerated - trace formula| / (1 + |H|_F^k) = %.3g", worst)};
}

Verdict ac5() {
  Rng rng(5150);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(rng.integer(2, 8));
    const fixtures::Instance inst = fixtures::random_instance(rng, n, trial % 2 == 0, trial % 3 == 0, true);
    const DensityState rho(inst.rho, kLoose);
    const HermitianOperator h(inst.hamiltonian, kLoose);
    const FqhReport r = analyze(rho, h, eigenbasis_from_vectors(rho, inst.energy_basis), 4);
    if (!r.commuting_case) return {false, "instance " + std::to_string(trial) + " not detected as commuting"};
    for (const auto* ms : {&r.moments_eigenstate, &r.moments_partial, &r.moments_full}) {
      for (double v : *ms) worst = std::max(worst, std::abs(v));
    }
  }
  return {worst <= 1e-9, fmt("max |moment| = %.3g", worst)};
}

// Rebuilds an operator from its construction basis after rotating every
// degenerate block by a random unitary.
ComplexMatrix rebased_operator(Rng& rng, const std::vector<ComplexVector>& basis, const std::vector<double>& values,
                               const std::vector<std::size_t>& block) {
  std::vector<ComplexVector> rotated = basis;
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t k = 0; k < block.size(); ++k) members[block[k]].push_back(k);
  for (const auto& [b, idx] : members) {
    if (idx.size() < 2) continue;
    const ComplexMatrix u = fixtures::random_unitary(rng, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
      ComplexVector v(basis.size(), 0.0);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t r = 0; r < basis.size(); ++r) v[r] += u(i, j) * basis[idx[i]][r];
      }
      rotated[idx[j]] = v;
    }
  }
  return fixtures::from_spectrum(rotated, values);
}

double max_entry_gap(const HeatDistribution& a, const HeatDistribution& b) {
  if (a.entries.size() != b.entries.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].label != b.entries[i].label) return INFINITY;
    worst = std::max({worst, std::abs(a.entries[i].probability - b.entries[i].probability),
                      std::abs(a.entries[i].heat - b.entries[i].heat)});
  }
  return worst;
}

Verdict ac6() {
  Rng rng(6006);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(rng.integer(2, 8));
    const fixtures::Instance inst = fixtures::random_instance(rng, n, true, trial % 2 == 0);
    const DensityState rho(inst.rho, kLoose);
    const HermitianOperator h(inst.hamiltonian, kLoose);
    const DensityState rho2(rebased_operator(rng, inst.state_basis, inst.state_values, inst.state_block), kLoose);
    const HermitianOperator h2(rebased_operator(rng, inst.energy_basis, inst.energy_values, inst.energy_block), kLoose);
    worst = std::max({worst, max_entry_gap(partial_cg_distribution(rho, h), partial_cg_distribution(rho2, h2)),
                      max_entry_gap(full_cg_distribution(rho, h), full_cg_distribution(rho2, h2))});
  }
  const Problem p = two_qubit_example();
  const StateEigenbasis ref = canonical_eigenbasis(p.rho);
  const std::size_t block = first_two_dim_cluster(ref).value();
  const double vq_a = variance_identities(p.rho, p.hamiltonian, bloch_rebased(ref, block, kPi / 2, 0.0)).var_q;
  const double vq_b = variance_identities(p.rho, p.hamiltonian, bloch_rebased(ref, block, 0.0, 0.0)).var_q;
  const bool ok = worst <= 1e-10 && std::abs(vq_a - vq_b) > 1e-3;
  return {ok, fmt("max coarse-grained entry change = %.3g, var_q(pi/2,0) = %.6f, var_q(0,0) = %.6f", worst, vq_a,
                  vq_b)};
}

Verdict ac7() {
  const std::vector<std::string> args{"sample", "--example", "two-qubit", "--level", "partial",
                                      "--n",    "1000000",   "--seed",    "42"};
  const CliRun a = cli(args);
  const CliRun b = cli(args);
  if (a.code != kExitOk) return {false, "exit code " + std::to_string(a.code) + ": " + a.err};
  const json doc = json::parse(a.out);
  const double var = doc["variance"]["empirical"].get<double>();
  const bool chi = doc["chi_square"]["passed"].get<bool>();
  const bool same = a.out == b.out;
  const bool ok = std::abs(var - 4.6) < 0.05 && chi && same;
  return {ok, fmt("empirical var_s = %.6f, chi-square %.3f vs critical %.3f", var,
                  doc["chi_square"]["statistic"].get<double>(), doc["chi_square"]["critical_999"].get<double>()) +
                  (same ? ", outputs identical" : ", outputs differ")};
}

Verdict ac8() {
  Rng rng(8008);
  double min_value = INFINITY, worst_commuting = 0.0, worst_purity = 0.0, worst_convexity = -INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(rng.integer(2, 8));
    const fixtures::Instance inst = fixtures::random_instance(rng, n, trial % 2 == 0, trial % 3 == 0);
    const HermitianOperator h(inst.hamiltonian, kLoose);
    const HermitianOperator rho(inst.rho, kLoose);
    min_value = std::min(min_value, skew_information(rho, h));

    const fixtures::Instance comm = fixtures::random_instance(rng, n, trial % 2 == 0, trial % 3 == 0, true);
    worst_commuting = std::max(worst_commuting, std::abs(skew_information(HermitianOperator(comm.rho, kLoose),
                                                                          HermitianOperator(comm.hamiltonian, kLoose))));

    const HermitianOperator pure(ComplexMatrix::projector(fixtures::random_orthonormal_basis(rng, n)[0]), kLoose);
    worst_purity = std::max(worst_purity, std::abs(skew_information(pure, h) - energy_variance(pure, h)));

    const fixtures::Instance other = fixtures::random_instance(rng, n, trial % 2 == 1, false);
    const HermitianOperator rho2(other.rho, kLoose);
    const HermitianOperator mid((inst.rho + other.rho) * Complex(0.5), kLoose);
    const double gap = skew_information(mid, h) - 0.5 * (skew_information(rho, h) + skew_information(rho2, h));
    worst_convexity = std::max(worst_convexity, gap);
  }
  const bool ok = min_value >= -1e-10 && worst_commuting <= 1e-9 && worst_purity <= 1e-9 && worst_convexity <= 1e-10;
  return {ok, fmt("min I = %.3g, max |I| commuting = %.3g, max |I - V| pure = %.3g", min_value, worst_commuting,
                  worst_purity) +
                  fmt(", max convexity violation = %.3g", worst_convexity)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
  };
  const Criterion criteria[] = {
      {"AC1", "two-qubit partial variance", 1.0, ac1},
      {"AC2", "64x64 Bloch sweep", 10.0, ac2},
      {"AC3", "identity suite (500 instances)", 30.0, ac3},
      {"AC4", "enumeration vs trace formulas", 0.0, ac4},
      {"AC5", "commuting collapse (100 instances)", 0.0, ac5},
      {"AC6", "gauge properties", 0.0, ac6},
      {"AC7", "Monte Carlo, seed 42, n = 1e6", 20.0, ac7},
      {"AC8", "skew information properties (200 instances)", 0.0, ac8},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && seconds >= c.budget_s) {
      o.passed = false;
      o.detail += fmt("; runtime %.2f s exceeds %.0f s", seconds, c.budget_s);
    }
    if (!o.passed) ++failures;
    std::printf("[%s] %s %s (%.3f s): %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, seconds, o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
