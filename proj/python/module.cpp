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

#include <algorithm>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fqh/commands.hpp"
#include "fqh/error.hpp"
#include "fqh/heat.hpp"
#include "fqh/problem.hpp"

namespace py = pybind11;
using namespace fqh;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

ComplexMatrix to_matrix(const CArray& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
    throw Error(ErrorCode::DimensionMismatch, "expected a square 2-d array");
  }
  const auto n = static_cast<std::size_t>(a.shape(0));
  return ComplexMatrix(n, std::vector<Complex>(a.data(), a.data() + n * n));
}

CArray to_array(const ComplexMatrix& m) {
  const auto n = static_cast<py::ssize_t>(m.dim());
  CArray out({n, n});
  std::ranges::copy(m.data(), out.mutable_data());
  return out;
}

// Columns of a square array are the basis vectors.
std::vector<ComplexVector> to_columns(const CArray& a) {
  const ComplexMatrix m = to_matrix(a);
  std::vector<ComplexVector> cols(m.dim(), ComplexVector(m.dim()));
  for (std::size_t j = 0; j < m.dim(); ++j) {
    for (std::size_t i = 0; i < m.dim(); ++i) cols[j][i] = m(i, j);
  }
  return cols;
}

Problem make_problem(const CArray& rho, const CArray& hamiltonian, const std::optional<CArray>& basis) {
  const Tolerances tol = Tolerances::from_environment();
  Problem p{"python", HermitianOperator(to_matrix(hamiltonian), tol), DensityState(to_matrix(rho), tol),
            std::nullopt};
  if (basis) p.basis = to_columns(*basis);
  return p;
}

// "default", "bloch:THETA,PHI", or an explicit basis array.
StateEigenbasis basis_for(const Problem& p, const std::optional<CArray>& basis, const std::string& choice) {
  if (basis) return eigenbasis_from_vectors(p.rho, *p.basis);
  return resolve_basis(p, choice);
}

py::object to_python(const nlohmann::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

py::list entries(const HeatDistribution& d) {
  py::list out;
  for (const auto& e : d.entries) out.append(py::make_tuple(py::tuple(py::cast(e.label)), e.probability, e.heat));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fluctuating quantum heat of projective energy measurements";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = "[" + std::string(to_string(e.code())) + "] " + e.what();
      PyErr_SetString(PyExc_ValueError, msg.c_str());
    }
  });

  m.def(
      "two_qubit_example",
      [] {
        const Problem p = two_qubit_example();
        return py::make_tuple(to_array(p.rho.matrix()), to_array(p.hamiltonian.matrix()));
      },
      "(rho, hamiltonian) of the built-in two-qubit example.");

  m.def(
      "analyze",
      [](const CArray& rho, const CArray& hamiltonian, const std::optional<CArray>& basis, const std::string& choice,
         int max_order) {
        const Problem p = make_problem(rho, hamiltonian, basis);
        const FqhReport r = analyze(p.rho, p.hamiltonian, basis_for(p, basis, choice), max_order);
        return to_python(report_to_json(r, p));
      },
      py::arg("rho"), py::arg("hamiltonian"), py::arg("basis") = py::none(), py::arg("choice") = "default",
      py::arg("max_order") = 4, "Full report as a dict, in the same layout as `fqh analyze`.");

  m.def(
      "eigenstate_distribution",
      [](const CArray& rho, const CArray& hamiltonian, const std::optional<CArray>& basis, const std::string& choice) {
        const Problem p = make_problem(rho, hamiltonian, basis);
        return entries(eigenstate_distribution(p.rho, p.hamiltonian, basis_for(p, basis, choice)));
      },
      py::arg("rho"), py::arg("hamiltonian"), py::arg("basis") = py::none(), py::arg("choice") = "default");

  m.def(
      "partial_cg_distribution",
      [](const CArray& rho, const CArray& hamiltonian) {
        const Problem p = make_problem(rho, hamiltonian, std::nullopt);
        return entries(partial_cg_distribution(p.rho, p.hamiltonian));
      },
      py::arg("rho"), py::arg("hamiltonian"));

  m.def(
      "full_cg_distribution",
      [](const CArray& rho, const CArray& hamiltonian) {
        const Problem p = make_problem(rho, hamiltonian, std::nullopt);
        return entries(full_cg_distribution(p.rho, p.hamiltonian));
      },
      py::arg("rho"), py::arg("hamiltonian"));

  m.def(
      "skew_information",
      [](const CArray& state, const CArray& hamiltonian) {
        const Tolerances tol = Tolerances::from_environment();
        return skew_information(HermitianOperator(to_matrix(state), tol),
                                HermitianOperator(to_matrix(hamiltonian), tol));
      },
      py::arg("state"), py::arg("hamiltonian"));

  m.def(
      "sweep",
      [](const CArray& rho, const CArray& hamiltonian, std::size_t theta_steps, std::size_t phi_steps,
         unsigned threads) {
        const auto rows = run_sweep(make_problem(rho, hamiltonian, std::nullopt), theta_steps, phi_steps, threads);
        py::array_t<double> out({static_cast<py::ssize_t>(rows.size()), py::ssize_t{5}});
        auto v = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const auto k = static_cast<py::ssize_t>(i);
          v(k, 0) = rows[i].theta;
          v(k, 1) = rows[i].phi;
          v(k, 2) = rows[i].var_q;
          v(k, 3) = rows[i].var_s;
          v(k, 4) = rows[i].var_diff;
        }
        return out;
      },
      py::arg("rho"), py::arg("hamiltonian"), py::arg("theta_steps") = 64, py::arg("phi_steps") = 64,
      py::arg("threads") = 0, "Rows (theta, phi, var_q, var_s, var_diff), theta-major.");

  m.def(
      "sample",
      [](const CArray& rho, const CArray& hamiltonian, const std::string& level, std::size_t n, std::uint64_t seed,
         bool sequential, int max_order, const std::string& choice) {
        SampleOptions o;
        o.level = parse_level(level);
        o.n = n;
        o.seed = seed;
        o.sequential = sequential;
        o.max_order = max_order;
        o.basis = choice;
        return to_python(sample_report(make_problem(rho, hamiltonian, std::nullopt), o));
      },
      py::arg("rho"), py::arg("hamiltonian"), py::arg("level") = "partial", py::arg("n") = 100000,
      py::arg("seed") = 42, py::arg("sequential") = false, py::arg("max_order") = 4, py::arg("choice") = "default",
      "Monte Carlo report as a dict, in the same layout as `fqh sample`.");
}
