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

#include "fqh/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "fqh/error.hpp"

namespace fqh {

namespace {

using nlohmann::json;

json distribution_json(const HeatDistribution& dist) {
  json entries = json::array();
  for (const auto& e : dist.entries) {
    entries.push_back({{"label", e.label}, {"probability", e.probability}, {"heat", e.heat}});
  }
  return entries;
}

std::pair<double, double> parse_angles(const std::string& spec) {
  const auto comma = spec.find(',');
  if (comma == std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "bloch basis expects 'bloch:THETA,PHI', got '" + spec + "'");
  }
  auto number = [&](const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) {
      throw Error(ErrorCode::InvalidArgument, "not a number: '" + text + "'");
    }
    return v;
  };
  return {number(spec.substr(0, comma)), number(spec.substr(comma + 1))};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Writes to --out when given, otherwise to the command's stdout stream.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  file << text;
}

Problem load_input(const std::string& file, const std::string& example, const Tolerances& tol) {
  if (!example.empty() && !file.empty()) {
    throw Error(ErrorCode::InvalidArgument, "give either a problem file or --example, not both");
  }
  if (!example.empty()) return builtin_example(example, tol);
  if (file.empty()) throw Error(ErrorCode::InvalidArgument, "no problem file given (or use --example)");
  return load_problem(file, tol);
}

}  // namespace

StateEigenbasis resolve_basis(const Problem& problem, const std::string& choice) {
  if (choice == "default") return default_eigenbasis(problem.rho);
  if (choice == "file") {
    if (!problem.basis) throw Error(ErrorCode::InvalidArgument, "problem file has no 'basis' field");
    StateEigenbasis b = eigenbasis_from_vectors(problem.rho, *problem.basis);
    b.tag = "file";
    return b;
  }
  if (choice.rfind("bloch:", 0) == 0) {
    const auto [theta, phi] = parse_angles(choice.substr(6));
    const StateEigenbasis reference = canonical_eigenbasis(problem.rho);
    const auto cluster = first_two_dim_cluster(reference);
    if (!cluster) {
      throw Error(ErrorCode::NoDegenerateBlock,
                  "bloch basis needs a two-dimensional degenerate eigenvalue cluster of rho");
    }
    return bloch_rebased(reference, *cluster, theta, phi);
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown basis '" + choice + "' (expected default|file|bloch:THETA,PHI)");
}

json report_to_json(const FqhReport& r, const Problem& problem) {
  json doc;
  doc["problem"] = problem.name;
  doc["dim"] = problem.rho.dim();
  doc["max_order"] = r.max_order;
  doc["basis_tag"] = r.basis_tag;
  doc["distributions"] = {
      {"eigenstate", distribution_json(r.eigenstate)},
      {"partial", distribution_json(r.partial)},
      {"full", distribution_json(r.full)},
      {"partial_skipped_pairs", r.partial.skipped},
  };
  doc["moments"] = {
      {"eigenstate", {{"enumerated", r.moments_eigenstate}, {"trace_formula", r.trace_moments_eigenstate},
                     {"compact_form", r.compact_moments_eigenstate}}},
      {"partial", {{"enumerated", r.moments_partial}, {"trace_formula", r.trace_moments_partial}}},
      {"full", {{"enumerated", r.moments_full}}},
  };
  doc["max_formula_discrepancy"] = r.max_formula_discrepancy;
  doc["variances"] = {{"eigenstate", r.var_q}, {"partial", r.var_s}, {"full", r.var_b}};
  doc["skew_bounds"] = {{"eigenstate", r.skew_bound_eigenstate}, {"partial", r.skew_bound_partial}};
  doc["cauchy_schwarz"] = {{"tight_expected", r.bound_tight_expected}, {"tight", r.bound_tight}};
  doc["commuting_case"] = r.commuting_case;
  doc["basis_diagonalizes_hamiltonian"] = r.basis_diagonalizes_hamiltonian;
  doc["prob_floor_triggered"] = r.prob_floor_triggered;
  doc["checks"] = {
      {"first_moments_zero", r.first_moments_zero},
      {"ordering_ok", r.ordering_ok},
      {"bounds_ok", r.bounds_ok},
      {"skew_identity_ok", r.skew_identity_ok},
      {"formulas_agree", r.formulas_agree},
      {"commuting_moments_zero", r.commuting_moments_zero},
  };
  doc["failed_checks"] = r.failed_checks();
  return doc;
}

std::vector<SweepRow> run_sweep(const Problem& problem, std::size_t theta_steps, std::size_t phi_steps,
                                unsigned threads) {
  if (theta_steps == 0 || phi_steps == 0) {
    throw Error(ErrorCode::InvalidArgument, "sweep needs at least one step per angle");
  }
  const StateEigenbasis reference = canonical_eigenbasis(problem.rho);
  const auto cluster = first_two_dim_cluster(reference);
  if (!cluster) {
    throw Error(ErrorCode::NoDegenerateBlock,
                "sweep needs a two-dimensional degenerate eigenvalue cluster of rho");
  }
  const auto s = moments_enumerated(partial_cg_distribution(problem.rho, problem.hamiltonian), 2);
  const double var_s = s[1] - s[0] * s[0];

  std::vector<SweepRow> rows(theta_steps * phi_steps);
  auto evaluate = [&](std::size_t idx) {
    const std::size_t i = idx / phi_steps;
    const std::size_t j = idx % phi_steps;
    SweepRow& row = rows[idx];
    row.theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(theta_steps);
    row.phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(phi_steps);
    const StateEigenbasis basis = bloch_rebased(reference, *cluster, row.theta, row.phi);
    const auto q = moments_enumerated(eigenstate_distribution(problem.rho, problem.hamiltonian, basis), 2);
    row.var_q = q[1] - q[0] * q[0];
    row.var_s = var_s;
    row.var_diff = row.var_q - row.var_s;
  };

  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, rows.size()));
  if (workers <= 1) {
    for (std::size_t idx = 0; idx < rows.size(); ++idx) evaluate(idx);
    return rows;
  }
  // Strided partition; each worker writes only its own rows.
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> failures(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t idx = w; idx < rows.size(); idx += workers) evaluate(idx);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "theta,phi,var_q,var_s,var_diff\n";
  for (const auto& r : rows) {
    out << format_double(r.theta) << ',' << format_double(r.phi) << ',' << format_double(r.var_q) << ','
        << format_double(r.var_s) << ',' << format_double(r.var_diff) << '\n';
  }
}

json sample_report(const Problem& problem, const SampleOptions& options) {
  const StateEigenbasis basis = resolve_basis(problem, options.basis);
  HeatDistribution dist;
  switch (options.level) {
    case Level::Eigenstate: dist = eigenstate_distribution(problem.rho, problem.hamiltonian, basis); break;
    case Level::PartialCG: dist = partial_cg_distribution(problem.rho, problem.hamiltonian); break;
    case Level::FullCG: dist = full_cg_distribution(problem.rho, problem.hamiltonian); break;
  }
  const SampleRun run =
      options.sequential
          ? sample_sequential(problem.rho, problem.hamiltonian, options.level, options.n, options.seed,
                              options.max_order, basis)
          : sample(dist, options.n, options.seed, options.max_order);
  const auto analytic = moments_enumerated(dist, options.max_order);

  json doc;
  doc["problem"] = problem.name;
  doc["level"] = std::string(to_string(options.level));
  doc["mode"] = options.sequential ? "sequential" : "direct";
  doc["seed"] = options.seed;
  doc["n"] = options.n;
  if (options.level == Level::Eigenstate) doc["basis_tag"] = basis.tag;

  std::vector<double> deviation;
  for (std::size_t k = 0; k < analytic.size(); ++k) deviation.push_back(run.empirical_moments[k] - analytic[k]);
  doc["moments"] = {{"empirical", run.empirical_moments}, {"analytic", analytic}, {"deviation", deviation}};
  doc["variance"] = {
      {"empirical", run.empirical_moments[1] - run.empirical_moments[0] * run.empirical_moments[0]},
      {"analytic", analytic[1] - analytic[0] * analytic[0]},
  };

  json probs = json::array();
  double max_dev = 0.0;
  for (const auto& e : dist.entries) {
    const auto it = run.empirical_probs.find(e.label);
    const double empirical = it == run.empirical_probs.end() ? 0.0 : it->second;
    max_dev = std::max(max_dev, std::abs(empirical - e.probability));
    probs.push_back({{"label", e.label}, {"analytic", e.probability}, {"empirical", empirical}, {"heat", e.heat}});
  }
  doc["probabilities"] = std::move(probs);
  doc["max_abs_probability_deviation"] = max_dev;

  const ChiSquareResult chi = chi_square_goodness_of_fit(run, dist);
  doc["chi_square"] = {{"statistic", chi.statistic}, {"dof", chi.dof}, {"critical_999", chi.critical},
                       {"passed", chi.passed}};
  return doc;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and sampled statistics of fluctuating quantum heat under projective energy measurement"};
  app.require_subcommand(1);

  std::string file;
  std::string example;
  std::string out_path;
  std::string basis = "default";
  int order = 4;

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("problem", file, "Problem file (JSON)");
    cmd->add_option("--example", example, "Built-in fixture instead of a file")->check(CLI::IsMember({"two-qubit"}));
    cmd->add_option("--out", out_path, "Output file (default: stdout)");
  };

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Distributions, moments, variances and bounds");
  add_input(analyze_cmd);
  analyze_cmd->add_option("--K", order, "Highest moment order")->check(CLI::Range(2, kMaxOrder));
  analyze_cmd->add_option("--basis", basis, "default | file | bloch:THETA,PHI");

  std::size_t theta_steps = 64;
  std::size_t phi_steps = 64;
  unsigned threads = 0;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "var_q over the Bloch angles of a degenerate block (CSV)");
  add_input(sweep_cmd);
  sweep_cmd->add_option("--theta-steps", theta_steps, "Grid points over [0, pi)")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--phi-steps", phi_steps, "Grid points over [0, 2 pi)")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");

  SampleOptions sample_opts;
  std::string level = "partial";
  CLI::App* sample_cmd = app.add_subcommand("sample", "Monte Carlo measurement records");
  add_input(sample_cmd);
  sample_cmd->add_option("--level", level, "eigenstate | partial | full")
      ->check(CLI::IsMember({"eigenstate", "partial", "full"}));
  sample_cmd->add_option("--n", sample_opts.n, "Number of records")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", sample_opts.seed, "RNG seed");
  sample_cmd->add_flag("--sequential", sample_opts.sequential, "Simulate the two-step measurement record");
  sample_cmd->add_option("--K", order, "Highest moment order")->check(CLI::Range(2, kMaxOrder));
  sample_cmd->add_option("--basis", basis, "Eigenbasis for the eigenstate level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Tolerances tol = Tolerances::from_environment();
    const Problem problem = load_input(file, example, tol);

    if (*analyze_cmd) {
      const StateEigenbasis b = resolve_basis(problem, basis);
      const FqhReport report = analyze(problem.rho, problem.hamiltonian, b, order);
      emit(report_to_json(report, problem).dump(2) + "\n", out_path, out);
      const auto failed = report.failed_checks();
      for (const auto& name : failed) err << "invariant check failed: " << name << "\n";
      return failed.empty() ? kExitOk : kExitInvariant;
    }

    if (*sweep_cmd) {
      const auto rows = run_sweep(problem, theta_steps, phi_steps, threads);
      std::ostringstream csv;
      write_sweep_csv(csv, rows);
      emit(csv.str(), out_path, out);
      double min_diff = 0.0;
      for (const auto& r : rows) min_diff = std::min(min_diff, r.var_diff);
      if (min_diff < -tol.invariant) {
        err << "invariant check failed: var_q < var_s at some grid point (min diff " << min_diff << ")\n";
        return kExitInvariant;
      }
      return kExitOk;
    }

    sample_opts.level = parse_level(level);
    sample_opts.max_order = order;
    sample_opts.basis = basis;
    emit(sample_report(problem, sample_opts).dump(2) + "\n", out_path, out);
    return kExitOk;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace fqh
