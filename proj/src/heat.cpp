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

#include "fqh/heat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fqh/error.hpp"

namespace fqh {

namespace {

constexpr double kEigenResidualTol = 1e-8;
constexpr double kUnitarityTol = 1e-9;

void require_order(int max_order, int min_order) {
  if (max_order < min_order || max_order > kMaxOrder) {
    throw Error(ErrorCode::InvalidArgument, "moment order must be in [" + std::to_string(min_order) +
                                                ", " + std::to_string(kMaxOrder) + "], got " +
                                                std::to_string(max_order));
  }
}

void require_same_dim(const DensityState& rho, const HermitianOperator& h) {
  if (rho.dim() != h.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "state and hamiltonian dimensions differ: " +
                                                  std::to_string(rho.dim()) + " vs " +
                                                  std::to_string(h.dim()));
  }
}

std::string angle_str(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double residual(const ComplexMatrix& m, const ComplexVector& v, double lambda) {
  ComplexVector r = m.apply(v);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= lambda * v[i];
  return norm(r);
}

void require_eigenbasis_of(const DensityState& rho, const StateEigenbasis& basis) {
  if (basis.dim() != rho.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "basis and state dimensions differ");
  }
  if (basis.weights.size() != basis.vectors.size()) {
    throw Error(ErrorCode::InvalidArgument, "basis weights and groups differ in length");
  }
  require_complete_basis(basis.flat(), rho.dim());
  for (std::size_t m = 0; m < basis.vectors.size(); ++m) {
    for (const auto& v : basis.vectors[m]) {
      if (residual(rho.matrix(), v, basis.weights[m]) > kEigenResidualTol) {
        throw Error(ErrorCode::BasisNotEigen,
                    "basis vector in group " + std::to_string(m) + " is not an eigenvector of rho");
      }
    }
  }
}

double clipped(double eigenvalue) { return std::max(eigenvalue, 0.0); }

}  // namespace

std::size_t StateEigenbasis::dim() const {
  for (const auto& group : vectors) {
    if (!group.empty()) return group.front().size();
  }
  return 0;
}

std::vector<ComplexVector> StateEigenbasis::flat() const {
  std::vector<ComplexVector> out;
  for (const auto& group : vectors) out.insert(out.end(), group.begin(), group.end());
  return out;
}

StateEigenbasis default_eigenbasis(const DensityState& rho) {
  StateEigenbasis basis;
  for (const auto& c : rho.spectrum().clusters) {
    basis.weights.push_back(clipped(c.eigenvalue));
    basis.vectors.push_back(c.eigenvectors);
  }
  basis.tag = "eigh";
  return basis;
}

StateEigenbasis canonical_eigenbasis(const DensityState& rho) {
  const std::size_t n = rho.dim();
  StateEigenbasis basis;
  for (const auto& c : rho.spectrum().clusters) {
    std::vector<ComplexVector> residuals;
    for (std::size_t i = 0; i < n; ++i) {
      ComplexVector col(n);
      for (std::size_t k = 0; k < n; ++k) col[k] = c.projector(k, i);
      residuals.push_back(std::move(col));
    }
    std::vector<ComplexVector> chosen;
    while (chosen.size() < c.multiplicity) {
      std::size_t best = 0;
      double best_norm = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = norm(residuals[i]);
        if (r > best_norm + 1e-12) {
          best = i;
          best_norm = r;
        }
      }
      ComplexVector u = residuals[best];
      for (auto& z : u) z /= best_norm;
      for (auto& r : residuals) {
        const Complex overlap = inner(u, r);
        for (std::size_t k = 0; k < n; ++k) r[k] -= overlap * u[k];
      }
      chosen.push_back(std::move(u));
    }
    basis.weights.push_back(clipped(c.eigenvalue));
    basis.vectors.push_back(std::move(chosen));
  }
  basis.tag = "canonical";
  return basis;
}

StateEigenbasis eigenbasis_from_vectors(const DensityState& rho,
                                        std::span<const ComplexVector> vectors) {
  require_complete_basis(vectors, rho.dim());
  const auto& clusters = rho.spectrum().clusters;
  StateEigenbasis basis;
  for (const auto& c : clusters) {
    basis.weights.push_back(clipped(c.eigenvalue));
    basis.vectors.emplace_back();
  }
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    const ComplexVector& v = vectors[k];
    const double lambda = expectation(rho.matrix(), v).real();
    if (residual(rho.matrix(), v, lambda) > kEigenResidualTol) {
      throw Error(ErrorCode::BasisNotEigen,
                  "basis vector " + std::to_string(k) + " is not an eigenvector of rho");
    }
    std::size_t nearest = 0;
    for (std::size_t m = 1; m < clusters.size(); ++m) {
      if (std::abs(clusters[m].eigenvalue - lambda) < std::abs(clusters[nearest].eigenvalue - lambda)) {
        nearest = m;
      }
    }
    basis.vectors[nearest].push_back(v);
  }
  for (std::size_t m = 0; m < clusters.size(); ++m) {
    if (basis.vectors[m].size() != clusters[m].multiplicity) {
      throw Error(ErrorCode::BasisNotEigen,
                  "basis does not match the multiplicity of eigenvalue cluster " + std::to_string(m));
    }
  }
  basis.tag = "user";
  return basis;
}

std::optional<std::size_t> first_two_dim_cluster(const StateEigenbasis& basis) {
  for (std::size_t m = 0; m < basis.vectors.size(); ++m) {
    if (basis.vectors[m].size() == 2) return m;
  }
  return std::nullopt;
}

StateEigenbasis rebased(const StateEigenbasis& reference, std::size_t cluster,
                        const ComplexMatrix& unitary) {
  if (cluster >= reference.vectors.size()) {
    throw Error(ErrorCode::InvalidArgument, "no cluster " + std::to_string(cluster));
  }
  const auto& ref = reference.vectors[cluster];
  const std::size_t d = ref.size();
  if (unitary.dim() != d) {
    throw Error(ErrorCode::InvalidArgument, "unitary must be " + std::to_string(d) + "x" +
                                                std::to_string(d) + " for cluster " +
                                                std::to_string(cluster));
  }
  if (max_abs_diff(unitary.adjoint() * unitary, ComplexMatrix::identity(d)) > kUnitarityTol) {
    throw Error(ErrorCode::InvalidArgument, "rebasing matrix is not unitary");
  }
  StateEigenbasis out = reference;
  const std::size_t n = reference.dim();
  for (std::size_t j = 0; j < d; ++j) {
    ComplexVector v(n);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < n; ++k) v[k] += unitary(i, j) * ref[i][k];
    }
    out.vectors[cluster][j] = std::move(v);
  }
  out.tag = reference.tag + "+unitary[" + std::to_string(cluster) + "]";
  return out;
}

ComplexMatrix bloch_unitary(double theta, double phi) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const Complex e = std::polar(1.0, phi);
  ComplexMatrix u(2);
  u(0, 0) = e * c;
  u(1, 0) = s;
  u(0, 1) = s;
  u(1, 1) = -std::conj(e) * c;
  return u;
}

StateEigenbasis bloch_rebased(const StateEigenbasis& reference, std::size_t cluster, double theta,
                              double phi) {
  if (cluster >= reference.vectors.size() || reference.vectors[cluster].size() != 2) {
    throw Error(ErrorCode::NoDegenerateBlock,
                "Bloch rebasing needs a two-dimensional eigenvalue cluster");
  }
  StateEigenbasis out = rebased(reference, cluster, bloch_unitary(theta, phi));
  out.tag = reference.tag + "+bloch[" + std::to_string(cluster) + "](" + angle_str(theta) + "," +
            angle_str(phi) + ")";
  return out;
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Eigenstate: return "eigenstate";
    case Level::PartialCG: return "partial";
    case Level::FullCG: return "full";
  }
  return "unknown";
}

Level parse_level(std::string_view name) {
  if (name == "eigenstate") return Level::Eigenstate;
  if (name == "partial") return Level::PartialCG;
  if (name == "full") return Level::FullCG;
  throw Error(ErrorCode::InvalidArgument,
              "unknown level '" + std::string(name) + "' (expected eigenstate|partial|full)");
}

double HeatDistribution::total_probability() const {
  double total = 0.0;
  for (const auto& e : entries) total += e.probability;
  return total;
}

HeatDistribution eigenstate_distribution(const DensityState& rho, const HermitianOperator& hamiltonian,
                                         const StateEigenbasis& basis) {
  require_same_dim(rho, hamiltonian);
  require_eigenbasis_of(rho, basis);
  const auto& energy = hamiltonian.spectrum().clusters;

  HeatDistribution dist;
  dist.level = Level::Eigenstate;
  dist.basis_tag = basis.tag;
  for (std::size_t m = 0; m < basis.vectors.size(); ++m) {
    for (std::size_t mu = 0; mu < basis.vectors[m].size(); ++mu) {
      const ComplexVector& psi = basis.vectors[m][mu];
      const double initial_energy = expectation(hamiltonian.matrix(), psi).real();
      for (std::size_t n = 0; n < energy.size(); ++n) {
        for (std::size_t nu = 0; nu < energy[n].eigenvectors.size(); ++nu) {
          const double overlap = std::norm(inner(energy[n].eigenvectors[nu], psi));
          dist.entries.push_back(HeatEntry{{m, mu, n, nu},
                                           basis.weights[m] * overlap,
                                           energy[n].eigenvalue - initial_energy});
        }
      }
    }
  }
  return dist;
}

HeatDistribution partial_cg_distribution(const DensityState& rho, const HermitianOperator& hamiltonian) {
  require_same_dim(rho, hamiltonian);
  const double floor = rho.op().tolerances().prob_floor;
  const auto& state = rho.spectrum().clusters;
  const auto& energy = hamiltonian.spectrum().clusters;
  const ComplexMatrix& h = hamiltonian.matrix();

  HeatDistribution dist;
  dist.level = Level::PartialCG;
  for (std::size_t m = 0; m < state.size(); ++m) {
    const ComplexMatrix& pm = state[m].projector;
    const ComplexMatrix compressed = pm * h * pm;
    for (std::size_t n = 0; n < energy.size(); ++n) {
      const ComplexMatrix& pin = energy[n].projector;
      const double overlap = trace_product(pin, pm).real();
      if (!(overlap > floor)) {
        ++dist.skipped;
        continue;
      }
      const double weak = trace_product(pin, compressed).real();
      dist.entries.push_back(HeatEntry{{m, n},
                                       clipped(state[m].eigenvalue) * overlap,
                                       energy[n].eigenvalue - weak / overlap});
    }
  }
  return dist;
}

HeatDistribution full_cg_distribution(const DensityState& rho, const HermitianOperator& hamiltonian) {
  require_same_dim(rho, hamiltonian);
  HeatDistribution dist;
  dist.level = Level::FullCG;
  const auto& energy = hamiltonian.spectrum().clusters;
  for (std::size_t n = 0; n < energy.size(); ++n) {
    const double p = std::max(0.0, trace_product(energy[n].projector, rho.matrix()).real());
    dist.entries.push_back(HeatEntry{{n}, p, 0.0});
  }
  return dist;
}

std::uint64_t binomial(int k, int i) {
  if (k < 0 || k > kMaxOrder || i < 0 || i > k) {
    throw Error(ErrorCode::InvalidArgument, "binomial coefficient out of range");
  }
  std::uint64_t c = 1;
  for (int j = 1; j <= i; ++j) c = c * static_cast<std::uint64_t>(k - i + j) / static_cast<std::uint64_t>(j);
  return c;
}

std::vector<double> moments_enumerated(const HeatDistribution& dist, int max_order) {
  require_order(max_order, 1);
  std::vector<double> moments(static_cast<std::size_t>(max_order), 0.0);
  for (const auto& e : dist.entries) {
    double term = e.probability;
    for (int k = 0; k < max_order; ++k) {
      term *= e.heat;
      moments[static_cast<std::size_t>(k)] += term;
    }
  }
  return moments;
}

std::vector<double> moments_trace_formula_eigenstate(const DensityState& rho,
                                                     const HermitianOperator& hamiltonian,
                                                     const StateEigenbasis& basis, int max_order) {
  require_order(max_order, 1);
  require_same_dim(rho, hamiltonian);
  require_eigenbasis_of(rho, basis);
  const ComplexMatrix& h = hamiltonian.matrix();
  const ComplexMatrix d = rank1_pinch(basis.flat(), h);

  // h_pow[j] = H^j, dr_pow[i] = D(H)^i rho
  std::vector<ComplexMatrix> h_pow{ComplexMatrix::identity(h.dim())};
  std::vector<ComplexMatrix> dr_pow{rho.matrix()};
  for (int j = 1; j <= max_order; ++j) {
    h_pow.push_back(h_pow.back() * h);
    dr_pow.push_back(d * dr_pow.back());
  }
  std::vector<double> moments;
  for (int k = 1; k <= max_order; ++k) {
    double total = 0.0;
    for (int i = 0; i <= k; ++i) {
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      total += sign * static_cast<double>(binomial(k, i)) *
               trace_product(h_pow[static_cast<std::size_t>(k - i)], dr_pow[static_cast<std::size_t>(i)]).real();
    }
    moments.push_back(total);
  }
  return moments;
}

std::vector<double> moments_compact_formula_eigenstate(const DensityState& rho,
                                                       const HermitianOperator& hamiltonian,
                                                       const StateEigenbasis& basis, int max_order) {
  require_order(max_order, 1);
  require_same_dim(rho, hamiltonian);
  require_eigenbasis_of(rho, basis);
  const ComplexMatrix& h = hamiltonian.matrix();
  const ComplexMatrix shifted = h - rank1_pinch(basis.flat(), h);

  std::vector<double> moments;
  ComplexMatrix pow = shifted;
  for (int k = 1; k <= max_order; ++k) {
    moments.push_back(trace_product(pow, rho.matrix()).real());
    pow = pow * shifted;
  }
  return moments;
}

std::vector<double> moments_trace_formula_partial(const DensityState& rho,
                                                  const HermitianOperator& hamiltonian,
                                                  int max_order) {
  require_order(max_order, 1);
  require_same_dim(rho, hamiltonian);
  const double floor = rho.op().tolerances().prob_floor;
  const auto& state = rho.spectrum().clusters;
  const auto& energy = hamiltonian.spectrum().clusters;
  const ComplexMatrix& h = hamiltonian.matrix();

  std::vector<double> moments(static_cast<std::size_t>(max_order), 0.0);
  for (const auto& sm : state) {
    const ComplexMatrix compressed = sm.projector * h * sm.projector;
    const double weight = clipped(sm.eigenvalue);
    for (const auto& en : energy) {
      const double overlap = trace_product(en.projector, sm.projector).real();
      if (!(overlap > floor)) continue;
      const double ratio = trace_product(en.projector, compressed).real() / overlap;
      for (int k = 1; k <= max_order; ++k) {
        double sum = 0.0;
        for (int i = 0; i <= k; ++i) {
          const double sign = (i % 2 == 0) ? 1.0 : -1.0;
          sum += sign * static_cast<double>(binomial(k, i)) * std::pow(en.eigenvalue, k - i) *
                 std::pow(ratio, i);
        }
        moments[static_cast<std::size_t>(k - 1)] += weight * overlap * sum;
      }
    }
  }
  return moments;
}

double skew_information(const HermitianOperator& state, const HermitianOperator& hamiltonian) {
  if (state.dim() != hamiltonian.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "state and hamiltonian dimensions differ");
  }
  const ComplexMatrix root = psd_sqrt(state);
  const ComplexMatrix& h = hamiltonian.matrix();
  const double first = trace_product(h * h, state.matrix()).real();
  const ComplexMatrix hr = h * root;
  return first - trace_product(hr, hr).real();
}

double energy_variance(const HermitianOperator& state, const HermitianOperator& hamiltonian) {
  const ComplexMatrix& h = hamiltonian.matrix();
  const double mean = trace_product(h, state.matrix()).real();
  return trace_product(h * h, state.matrix()).real() - mean * mean;
}

bool commutes(const DensityState& rho, const HermitianOperator& hamiltonian) {
  require_same_dim(rho, hamiltonian);
  const double scale = rho.matrix().frobenius_norm() * hamiltonian.matrix().frobenius_norm();
  return commutator(rho.matrix(), hamiltonian.matrix()).frobenius_norm() <=
         rho.op().tolerances().invariant * scale;
}

VarianceIdentities variance_identities(const DensityState& rho, const HermitianOperator& hamiltonian,
                                       const StateEigenbasis& basis) {
  VarianceIdentities out;
  const auto q = moments_enumerated(eigenstate_distribution(rho, hamiltonian, basis), 2);
  const auto s = moments_enumerated(partial_cg_distribution(rho, hamiltonian), 2);
  out.var_q = q[1] - q[0] * q[0];
  out.var_s = s[1] - s[0] * s[0];

  const Tolerances& tol = rho.op().tolerances();
  for (std::size_t m = 0; m < basis.vectors.size(); ++m) {
    for (const auto& psi : basis.vectors[m]) {
      out.skew_bound_eigenstate +=
          basis.weights[m] * skew_information(HermitianOperator(ComplexMatrix::projector(psi), tol),
                                              hamiltonian);
    }
  }

  bool non_degenerate = true;
  for (const auto& c : rho.spectrum().clusters) {
    const double d = static_cast<double>(c.multiplicity);
    const double q_m = clipped(c.eigenvalue) * d;
    const HermitianOperator block(c.projector * Complex(1.0 / d), tol);
    out.skew_bound_partial += q_m * skew_information(block, hamiltonian);
    non_degenerate = non_degenerate && c.multiplicity == 1;
  }
  out.bound_tight_expected = non_degenerate || commutes(rho, hamiltonian);
  out.bound_tight = std::abs(out.skew_bound_partial - out.var_s) <= tol.identity;
  return out;
}

std::vector<CauchySchwarzTerm> cauchy_schwarz_terms(const DensityState& rho,
                                                    const HermitianOperator& hamiltonian) {
  require_same_dim(rho, hamiltonian);
  const double floor = rho.op().tolerances().prob_floor;
  const auto& state = rho.spectrum().clusters;
  const auto& energy = hamiltonian.spectrum().clusters;
  std::vector<CauchySchwarzTerm> out;
  for (std::size_t m = 0; m < state.size(); ++m) {
    const ComplexMatrix compressed = state[m].projector * hamiltonian.matrix() * state[m].projector;
    const ComplexMatrix squared = compressed * compressed;
    for (std::size_t n = 0; n < energy.size(); ++n) {
      const double overlap = trace_product(energy[n].projector, state[m].projector).real();
      if (!(overlap > floor)) continue;
      const double weak = trace_product(energy[n].projector, compressed).real();
      out.push_back(CauchySchwarzTerm{m, n, weak * weak / overlap,
                                      trace_product(energy[n].projector, squared).real()});
    }
  }
  return out;
}

std::vector<std::string> FqhReport::failed_checks() const {
  std::vector<std::string> failed;
  if (!first_moments_zero) failed.emplace_back("first_moments_zero");
  if (!ordering_ok) failed.emplace_back("variance_ordering");
  if (!bounds_ok) failed.emplace_back("skew_bounds");
  if (!skew_identity_ok) failed.emplace_back("skew_identity");
  if (!formulas_agree) failed.emplace_back("formula_agreement");
  if (!commuting_moments_zero) failed.emplace_back("commuting_moments_zero");
  if (bound_tight_expected && !bound_tight) failed.emplace_back("cauchy_schwarz_tightness");
  return failed;
}

FqhReport analyze(const DensityState& rho, const HermitianOperator& hamiltonian,
                  const StateEigenbasis& basis, int max_order) {
  require_order(max_order, 2);
  const Tolerances& tol = rho.op().tolerances();

  FqhReport r;
  r.max_order = max_order;
  r.basis_tag = basis.tag;
  r.eigenstate = eigenstate_distribution(rho, hamiltonian, basis);
  r.partial = partial_cg_distribution(rho, hamiltonian);
  r.full = full_cg_distribution(rho, hamiltonian);
  r.prob_floor_triggered = r.partial.skipped > 0;

  r.moments_eigenstate = moments_enumerated(r.eigenstate, max_order);
  r.moments_partial = moments_enumerated(r.partial, max_order);
  r.moments_full = moments_enumerated(r.full, max_order);
  r.trace_moments_eigenstate = moments_trace_formula_eigenstate(rho, hamiltonian, basis, max_order);
  r.trace_moments_partial = moments_trace_formula_partial(rho, hamiltonian, max_order);
  r.compact_moments_eigenstate = moments_compact_formula_eigenstate(rho, hamiltonian, basis, max_order);

  const double h_norm = hamiltonian.matrix().frobenius_norm();
  for (int k = 1; k <= max_order; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    const double scale = 1.0 + std::pow(h_norm, k);
    r.max_formula_discrepancy =
        std::max({r.max_formula_discrepancy,
                  std::abs(r.moments_eigenstate[i] - r.trace_moments_eigenstate[i]) / scale,
                  std::abs(r.moments_partial[i] - r.trace_moments_partial[i]) / scale});
  }
  r.formulas_agree = r.max_formula_discrepancy <= tol.identity;

  auto variance = [](const std::vector<double>& m) { return m[1] - m[0] * m[0]; };
  r.var_q = variance(r.moments_eigenstate);
  r.var_s = variance(r.moments_partial);
  r.var_b = variance(r.moments_full);

  const VarianceIdentities ids = variance_identities(rho, hamiltonian, basis);
  r.skew_bound_eigenstate = ids.skew_bound_eigenstate;
  r.skew_bound_partial = ids.skew_bound_partial;
  r.bound_tight_expected = ids.bound_tight_expected;
  r.bound_tight = ids.bound_tight;

  r.first_moments_zero = std::abs(r.moments_eigenstate[0]) <= tol.invariant &&
                         std::abs(r.moments_partial[0]) <= tol.invariant &&
                         std::abs(r.moments_full[0]) <= tol.invariant;
  r.ordering_ok = r.var_b <= r.var_s + tol.invariant && r.var_s <= r.var_q + tol.invariant;
  r.bounds_ok = r.var_s <= r.skew_bound_partial + tol.invariant &&
                r.skew_bound_partial <= r.var_q + tol.invariant;
  r.skew_identity_ok = std::abs(r.var_q - r.skew_bound_eigenstate) <= tol.identity;

  r.commuting_case = commutes(rho, hamiltonian);
  const ComplexMatrix& h = hamiltonian.matrix();
  r.basis_diagonalizes_hamiltonian =
      (h - rank1_pinch(basis.flat(), h)).frobenius_norm() <= tol.invariant * (1.0 + h.frobenius_norm());
  if (r.commuting_case) {
    std::vector<const std::vector<double>*> levels{&r.moments_partial, &r.moments_full};
    if (r.basis_diagonalizes_hamiltonian) levels.push_back(&r.moments_eigenstate);
    for (const auto* ms : levels) {
      for (double v : *ms) r.commuting_moments_zero = r.commuting_moments_zero && std::abs(v) <= tol.invariant;
    }
  }
  return r;
}

}  // namespace fqh
