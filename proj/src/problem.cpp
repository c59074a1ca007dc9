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

#include "fqh/problem.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "fqh/error.hpp"
#include "fqh/heat.hpp"

namespace fqh {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

Complex parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  parse_fail(where + ": expected a number or [re, im]");
}

ComplexVector parse_vector(const json& v, std::size_t dim, const std::string& where) {
  if (!v.is_array() || v.size() != dim) {
    parse_fail(where + ": expected an array of " + std::to_string(dim) + " entries");
  }
  ComplexVector out;
  for (std::size_t i = 0; i < dim; ++i) out.push_back(parse_complex(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

ComplexMatrix parse_matrix(const json& doc, const char* key, std::size_t dim) {
  if (!doc.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  const json& rows = doc.at(key);
  if (!rows.is_array() || rows.size() != dim) {
    parse_fail(std::string(key) + ": expected " + std::to_string(dim) + " rows");
  }
  std::vector<Complex> data;
  for (std::size_t i = 0; i < dim; ++i) {
    const ComplexVector row = parse_vector(rows[i], dim, std::string(key) + "[" + std::to_string(i) + "]");
    data.insert(data.end(), row.begin(), row.end());
  }
  return ComplexMatrix(dim, std::move(data));
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Tolerances parse_tolerances(const json& doc, Tolerances tol) {
  if (!doc.contains("tolerances")) return tol;
  const json& t = doc.at("tolerances");
  if (!t.is_object()) parse_fail("tolerances: expected an object");
  auto read = [&](const char* key, double& field) {
    if (!t.contains(key)) return;
    if (!t.at(key).is_number() || t.at(key).get<double>() < 0.0) {
      parse_fail(std::string("tolerances.") + key + ": expected a non-negative number");
    }
    field = t.at(key).get<double>();
  };
  read("hermiticity", tol.hermiticity);
  read("trace", tol.trace);
  read("psd", tol.psd);
  read("cluster_rel", tol.cluster_rel);
  read("prob_floor", tol.prob_floor);
  return tol;
}

}  // namespace

Problem parse_problem(const json& doc, const Tolerances& base, const std::string& name) {
  if (!doc.is_object()) parse_fail("problem file must be a JSON object");
  if (!doc.contains("dim") || !doc.at("dim").is_number_integer() || doc.at("dim").get<long long>() < 1) {
    parse_fail("dim: expected a positive integer");
  }
  const auto dim = static_cast<std::size_t>(doc.at("dim").get<long long>());
  const Tolerances tol = parse_tolerances(doc, base);

  const ComplexMatrix h = parse_matrix(doc, "hamiltonian", dim);
  const ComplexMatrix rho = parse_matrix(doc, "rho", dim);
  std::optional<std::vector<ComplexVector>> basis;
  if (doc.contains("basis")) {
    const json& b = doc.at("basis");
    if (!b.is_array() || b.size() != dim) parse_fail("basis: expected " + std::to_string(dim) + " vectors");
    basis.emplace();
    for (std::size_t k = 0; k < dim; ++k) basis->push_back(parse_vector(b[k], dim, "basis[" + std::to_string(k) + "]"));
  }
  return Problem{name, HermitianOperator(h, tol), DensityState(HermitianOperator(rho, tol)), std::move(basis)};
}

Problem load_problem(const std::filesystem::path& path, const Tolerances& base) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    parse_fail(path.string() + ": " + e.what());
  }
  return parse_problem(doc, base, path.filename().string());
}

json problem_to_json(const Problem& problem) {
  json doc;
  doc["dim"] = problem.rho.dim();
  doc["hamiltonian"] = matrix_json(problem.hamiltonian.matrix());
  doc["rho"] = matrix_json(problem.rho.matrix());
  if (problem.basis) {
    json vecs = json::array();
    for (const auto& v : *problem.basis) {
      json row = json::array();
      for (const auto& z : v) row.push_back(complex_json(z));
      vecs.push_back(std::move(row));
    }
    doc["basis"] = std::move(vecs);
  }
  return doc;
}

Problem two_qubit_example(const Tolerances& tol) {
  const ComplexVector plus{1.0, 0.0};
  const ComplexVector minus{0.0, 1.0};

  // |1> = |psi^+_{pi/2,0}>, |0> = |psi^-_{pi/2,0}>: the columns of the Bloch
  // unitary expressed over (|+>, |->).
  const ComplexMatrix u = bloch_unitary(std::numbers::pi / 2.0, 0.0);
  const ComplexVector one{u(0, 0), u(1, 0)};
  const ComplexVector zero{u(0, 1), u(1, 1)};

  ComplexMatrix h(4);
  const ComplexVector* qubit[2] = {&zero, &one};
  double energy = 1.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      h += ComplexMatrix::projector(kron(*qubit[i], *qubit[j])) * Complex(energy);
      energy += 2.0;
    }
  }

  const ComplexMatrix id2 = ComplexMatrix::identity(2);
  const ComplexMatrix rho =
      kron(ComplexMatrix::projector(plus), id2 * Complex(0.2)) +
      kron(ComplexMatrix::projector(minus), ComplexMatrix::projector(plus) * Complex(0.1) +
                                                ComplexMatrix::projector(minus) * Complex(0.5));

  return Problem{"two-qubit", HermitianOperator(h, tol), DensityState(HermitianOperator(rho, tol)),
                 std::nullopt};
}

Problem builtin_example(const std::string& name, const Tolerances& tol) {
  if (name == "two-qubit") return two_qubit_example(tol);
  throw Error(ErrorCode::InvalidArgument, "unknown example '" + name + "' (available: two-qubit)");
}

}  // namespace fqh
