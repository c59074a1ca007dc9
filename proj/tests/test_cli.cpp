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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fqh/commands.hpp"
#include "fqh/error.hpp"
#include "fqh/problem.hpp"
#include "gtest/gtest.h"

using namespace fqh;
using nlohmann::json;

namespace {

const std::filesystem::path kData = FQH_TEST_DATA_DIR;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "fqh");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto dir = std::filesystem::temp_directory_path() / "fqh_cli_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << contents;
  return path;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Cli, analyze_two_qubit_example) {
  const Result r = run({"analyze", "--example", "two-qubit"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_NEAR(doc["variances"]["partial"].get<double>(), 4.6, 1e-9);
  EXPECT_EQ(doc["basis_tag"], "eigh");
  EXPECT_TRUE(doc["failed_checks"].empty());
  EXPECT_EQ(doc["dim"], 4);
}

TEST(Cli, non_hermitian_input_is_a_validation_error) {
  const Result r = run({"analyze", (kData / "non_hermitian.json").string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("hermiticity violated"), std::string::npos) << r.err;
}

TEST(Cli, malformed_and_missing_input) {
  const auto bad = temp_file("bad.json", "{\"dim\": 2, \"hamiltonian\": [[1, 0]");
  Result r = run({"analyze", bad.string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("ParseError"), std::string::npos) << r.err;

  const auto wrong_shape = temp_file("shape.json", R"({"dim": 2, "hamiltonian": [[1, 0], [0]], "rho": [[1, 0], [0, 0]]})");
  r = run({"analyze", wrong_shape.string()});
  EXPECT_EQ(r.code, kExitValidation);

  r = run({"analyze", "/nonexistent/problem.json"});
  EXPECT_EQ(r.code, kExitValidation);

  const auto not_a_state = temp_file("trace.json", R"({"dim": 2, "hamiltonian": [[1, 0], [0, 1]], "rho": [[1, 0], [0, 1]]})");
  r = run({"analyze", not_a_state.string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("trace violated"), std::string::npos) << r.err;
}

TEST(Cli, usage_errors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"analyze", "--example", "two-qubit", "--K", "1"}).code, kExitUsage);
  EXPECT_EQ(run({"sample", "--example", "two-qubit", "--level", "nope"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, unknown_basis_option) {
  EXPECT_EQ(run({"analyze", "--example", "two-qubit", "--basis", "bloch:1"}).code, kExitValidation);
  EXPECT_EQ(run({"analyze", "--example", "two-qubit", "--basis", "whatever"}).code, kExitValidation);
  // The built-in example carries no basis.
  EXPECT_EQ(run({"analyze", "--example", "two-qubit", "--basis", "file"}).code, kExitValidation);
}

TEST(Cli, basis_from_file) {
  const Result r = run({"analyze", (kData / "qubit_x_basis.json").string(), "--basis", "file"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_NEAR(doc["variances"]["eigenstate"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(doc["variances"]["partial"].get<double>(), 0.0, 1e-12);
  EXPECT_EQ(doc["basis_tag"], "file");
}

TEST(Cli, commuting_fixture_has_zero_moments) {
  const Result r = run({"analyze", (kData / "commuting.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_TRUE(doc["commuting_case"].get<bool>());
  for (const char* level : {"eigenstate", "partial", "full"}) {
    for (double m : doc["moments"][level]["enumerated"].get<std::vector<double>>()) EXPECT_NEAR(m, 0.0, 1e-12);
  }
}

TEST(Cli, report_round_trips_through_text) {
  const auto path = std::filesystem::temp_directory_path() / "fqh_cli_tests" / "report.json";
  std::filesystem::create_directories(path.parent_path());
  const Result r = run({"analyze", "--example", "two-qubit", "--basis", "bloch:1,2", "--out", path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const json doc = json::parse(text);
  EXPECT_EQ(doc.dump(2) + "\n", text);
  EXPECT_EQ(json::parse(doc.dump())["variances"]["eigenstate"].get<double>(),
            doc["variances"]["eigenstate"].get<double>());
  EXPECT_NEAR(doc["variances"]["eigenstate"].get<double>(), 4.9509508509368025, 1e-9);
}

TEST(Cli, problem_json_round_trip) {
  const Problem p = two_qubit_example();
  const json doc = problem_to_json(p);
  const Problem q = parse_problem(json::parse(doc.dump()), Tolerances{});
  EXPECT_EQ(max_abs_diff(p.rho.matrix(), q.rho.matrix()), 0.0);
  EXPECT_EQ(max_abs_diff(p.hamiltonian.matrix(), q.hamiltonian.matrix()), 0.0);
}

TEST(Cli, sweep_csv_layout) {
  const Result r = run({"sweep", "--example", "two-qubit", "--theta-steps", "4", "--phi-steps", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  ASSERT_EQ(r.out.back(), '\n');
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 13u);
  EXPECT_EQ(rows[0], "theta,phi,var_q,var_s,var_diff");
  // Row-major over theta; second row is theta = 0, phi = 2 pi / 3.
  double theta = 0.0, phi = 0.0, vq = 0.0, vs = 0.0, vd = 0.0;
  ASSERT_EQ(std::sscanf(rows[2].c_str(), "%lf,%lf,%lf,%lf,%lf", &theta, &phi, &vq, &vs, &vd), 5);
  EXPECT_EQ(theta, 0.0);
  EXPECT_EQ(phi, 2.0 * std::numbers::pi / 3.0);
  EXPECT_NEAR(vs, 4.6, 1e-9);
  EXPECT_EQ(vd, vq - vs);
}

TEST(Cli, sweep_single_point_matches_analyze) {
  const Result sweep = run({"sweep", "--example", "two-qubit", "--theta-steps", "1", "--phi-steps", "1"});
  ASSERT_EQ(sweep.code, kExitOk);
  const auto rows = lines(sweep.out);
  ASSERT_EQ(rows.size(), 2u);
  double theta = 0.0, phi = 0.0, vq = 0.0, vs = 0.0, vd = 0.0;
  ASSERT_EQ(std::sscanf(rows[1].c_str(), "%lf,%lf,%lf,%lf,%lf", &theta, &phi, &vq, &vs, &vd), 5);

  const Result analyze = run({"analyze", "--example", "two-qubit", "--basis", "bloch:0,0"});
  ASSERT_EQ(analyze.code, kExitOk);
  const json doc = json::parse(analyze.out);
  EXPECT_NEAR(vq, doc["variances"]["eigenstate"].get<double>(), 1e-12);
  EXPECT_NEAR(vs, doc["variances"]["partial"].get<double>(), 1e-12);
}

TEST(Cli, sweep_is_thread_count_independent) {
  const Result one = run({"sweep", "--example", "two-qubit", "--theta-steps", "8", "--phi-steps", "8", "--threads", "1"});
  const Result many = run({"sweep", "--example", "two-qubit", "--theta-steps", "8", "--phi-steps", "8", "--threads", "5"});
  EXPECT_EQ(one.out, many.out);
}

TEST(Cli, sweep_requires_a_two_dimensional_block) {
  const Result r = run({"sweep", (kData / "commuting.json").string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("NoDegenerateBlock"), std::string::npos) << r.err;
}

TEST(Cli, sample_is_byte_identical_for_a_seed) {
  const std::vector<std::string> args{"sample", "--example", "two-qubit", "--n", "20000", "--seed", "42"};
  const Result a = run(args);
  const Result b = run(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const json doc = json::parse(a.out);
  EXPECT_TRUE(doc["chi_square"]["passed"].get<bool>());
}

TEST(Cli, sample_full_level_has_zero_variance) {
  for (const char* seed : {"1", "2"}) {
    const Result r = run({"sample", "--example", "two-qubit", "--level", "full", "--n", "1000", "--seed", seed});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(json::parse(r.out)["variance"]["empirical"].get<double>(), 0.0);
  }
}

TEST(Cli, sample_sequential_eigenstate) {
  const Result r = run({"sample", "--example", "two-qubit", "--level", "eigenstate", "--sequential", "--n", "20000",
                        "--basis", "bloch:1.5707963267948966,0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_NEAR(doc["variance"]["analytic"].get<double>(), 4.6, 1e-9);
  EXPECT_TRUE(doc["chi_square"]["passed"].get<bool>());
}

TEST(Cli, tolerance_scale_environment) {
  ::setenv("FQH_TOLERANCE_SCALE", "abc", 1);
  const Result bad = run({"analyze", "--example", "two-qubit"});
  // Hermiticity tolerance 1e-10 * 1e8 = 1e-2 still rejects a 0.1 asymmetry;
  // 1e-10 * 1e10 = 1 accepts it.
  ::setenv("FQH_TOLERANCE_SCALE", "1e8", 1);
  const Result strict = run({"analyze", (kData / "non_hermitian.json").string()});
  ::setenv("FQH_TOLERANCE_SCALE", "1e10", 1);
  const Result loose = run({"analyze", (kData / "non_hermitian.json").string()});
  ::unsetenv("FQH_TOLERANCE_SCALE");
  EXPECT_EQ(bad.code, kExitValidation);
  EXPECT_NE(bad.err.find("FQH_TOLERANCE_SCALE"), std::string::npos) << bad.err;
  EXPECT_EQ(strict.code, kExitValidation);
  EXPECT_NE(loose.code, kExitValidation) << loose.err;
}
