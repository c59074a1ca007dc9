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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fqh/instruments.hpp"
#include "fqh/linalg.hpp"

namespace fqh {

inline constexpr int kMaxOrder = 16;

// ---------------------------------------------------------------------------
// Eigenbases of the initial state
// ---------------------------------------------------------------------------

/// An orthonormal eigenbasis of a state, grouped by the state's spectral
/// clusters. Group m holds the d_m vectors |psi_{m,mu}>; weights[m] is the
/// common eigenvalue q_m / d_m. Inside a degenerate cluster the choice of
/// vectors is a gauge, which `tag` records.
struct StateEigenbasis {
  std::vector<double> weights;
  std::vector<std::vector<ComplexVector>> vectors;
  std::string tag;

  std::size_t dim() const;
  std::vector<ComplexVector> flat() const;
};

/// The eigenvectors returned by the eigensolver after clustering.
StateEigenbasis default_eigenbasis(const DensityState& rho);

/// Gram-Schmidt of the projected standard basis inside each cluster, taking
/// the largest remaining projection first (lowest index on ties). Reproducible
/// reference frame for rebasing.
StateEigenbasis canonical_eigenbasis(const DensityState& rho);

/// Groups caller-supplied vectors by cluster. Throws IncompleteBasis or
/// BasisNotEigen (residual |rho v - lambda v| above 1e-8).
StateEigenbasis eigenbasis_from_vectors(const DensityState& rho,
                                        std::span<const ComplexVector> vectors);

/// Index of the first cluster of dimension 2, if any.
std::optional<std::size_t> first_two_dim_cluster(const StateEigenbasis& basis);

/// Replaces the vectors of `cluster` by reference * unitary. Throws
/// InvalidArgument if the unitary has the wrong size or is not unitary.
StateEigenbasis rebased(const StateEigenbasis& reference, std::size_t cluster,
                        const ComplexMatrix& unitary);

/// Bloch rotation of a two-dimensional cluster with reference pair (|+>, |->):
///   |psi^+> =  e^{i phi} cos(theta/2) |+> + sin(theta/2) |->
///   |psi^-> = -e^{-i phi} cos(theta/2) |-> + sin(theta/2) |+>
StateEigenbasis bloch_rebased(const StateEigenbasis& reference, std::size_t cluster,
                              double theta, double phi);

/// Coefficients of |psi^+>, |psi^-> in the (|+>, |->) frame, as the columns
/// of a 2x2 unitary.
ComplexMatrix bloch_unitary(double theta, double phi);

// ---------------------------------------------------------------------------
// Heat distributions
// ---------------------------------------------------------------------------

enum class Level { Eigenstate, PartialCG, FullCG };

std::string_view to_string(Level level);
/// Accepts eigenstate|partial|full. Throws InvalidArgument.
Level parse_level(std::string_view name);

struct HeatEntry {
  Label label;
  double probability = 0.0;
  double heat = 0.0;
};

/// Labels: (m, mu, n, nu) for Eigenstate, (m, n) for PartialCG, (n) for FullCG.
/// m indexes the clusters of rho and n those of H, both in ascending order.
struct HeatDistribution {
  Level level = Level::FullCG;
  std::vector<HeatEntry> entries;
  std::string basis_tag;
  /// Pairs dropped because tr[Pi_n P_m] <= prob_floor (PartialCG only).
  std::size_t skipped = 0;

  double total_probability() const;
};

/// p = lambda_m |<phi_{n,nu}|psi_{m,mu}>|^2, heat = eps_n - <psi|H|psi>.
/// Throws BasisNotEigen / DimensionMismatch.
HeatDistribution eigenstate_distribution(const DensityState& rho, const HermitianOperator& hamiltonian,
                                         const StateEigenbasis& basis);

/// p = lambda_m tr[Pi_n P_m], heat = eps_n - tr[Pi_n P_m H P_m] / tr[Pi_n P_m].
HeatDistribution partial_cg_distribution(const DensityState& rho, const HermitianOperator& hamiltonian);

/// p = tr[Pi_n rho], heat identically 0.
HeatDistribution full_cg_distribution(const DensityState& rho, const HermitianOperator& hamiltonian);

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

/// C(k, i) as an exact integer; 0 <= i <= k <= kMaxOrder.
std::uint64_t binomial(int k, int i);

/// Element k-1 is sum p * heat^k, k = 1..max_order.
std::vector<double> moments_enumerated(const HeatDistribution& dist, int max_order);

/// sum_i C(k,i) (-1)^i tr[H^{k-i} D_psi(H)^i rho], with D_psi the rank-1
/// pinching in `basis`.
std::vector<double> moments_trace_formula_eigenstate(const DensityState& rho,
                                                     const HermitianOperator& hamiltonian,
                                                     const StateEigenbasis& basis, int max_order);

/// tr[(H - D_psi(H))^k rho]. Equal to the eigenstate moments for k <= 2 or
/// when H commutes with D_psi(H); differs in general from k = 3 on.
std::vector<double> moments_compact_formula_eigenstate(const DensityState& rho,
                                                       const HermitianOperator& hamiltonian,
                                                       const StateEigenbasis& basis, int max_order);

/// Binomial expansion over (m, n) pairs; pairs with tr[Pi_n P_m] <= prob_floor
/// contribute nothing.
std::vector<double> moments_trace_formula_partial(const DensityState& rho,
                                                  const HermitianOperator& hamiltonian,
                                                  int max_order);

// ---------------------------------------------------------------------------
// Skew information and variance bounds
// ---------------------------------------------------------------------------

/// Wigner-Yanase-Dyson skew information tr[H^2 s] - tr[H s^{1/2} H s^{1/2}]
/// for a PSD operator s. Throws NotPSD.
double skew_information(const HermitianOperator& state, const HermitianOperator& hamiltonian);

/// tr[H^2 rho] - tr[H rho]^2
double energy_variance(const HermitianOperator& state, const HermitianOperator& hamiltonian);

struct VarianceIdentities {
  double var_q = 0.0;
  double var_s = 0.0;
  /// sum_m lambda_m sum_mu I_{|psi_{m,mu}>}(H); equals var_q identically.
  double skew_bound_eigenstate = 0.0;
  /// sum_m q_m I_{P_m / d_m}(H); bounds var_s from above and var_q from below.
  double skew_bound_partial = 0.0;
  /// rho non-degenerate or commuting with H: var_s must reach its bound.
  bool bound_tight_expected = false;
  bool bound_tight = false;
};

VarianceIdentities variance_identities(const DensityState& rho, const HermitianOperator& hamiltonian,
                                       const StateEigenbasis& basis);

struct CauchySchwarzTerm {
  std::size_t m = 0;
  std::size_t n = 0;
  /// tr[Pi_n P_m H P_m]^2 / tr[Pi_n P_m]
  double lhs = 0.0;
  /// tr[Pi_n (P_m H P_m)^2]
  double rhs = 0.0;
};

std::vector<CauchySchwarzTerm> cauchy_schwarz_terms(const DensityState& rho,
                                                    const HermitianOperator& hamiltonian);

/// |[rho, H]|_F <= 1e-9 |rho|_F |H|_F
bool commutes(const DensityState& rho, const HermitianOperator& hamiltonian);

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct FqhReport {
  int max_order = 0;
  std::string basis_tag;

  HeatDistribution eigenstate;
  HeatDistribution partial;
  HeatDistribution full;

  /// Enumerated moments, k = 1..max_order, per level.
  std::vector<double> moments_eigenstate;
  std::vector<double> moments_partial;
  std::vector<double> moments_full;
  /// Closed-form moments for the two levels that have them.
  std::vector<double> trace_moments_eigenstate;
  std::vector<double> trace_moments_partial;
  /// tr[(H - D_psi(H))^k rho], reported for comparison only.
  std::vector<double> compact_moments_eigenstate;
  double max_formula_discrepancy = 0.0;

  double var_q = 0.0;
  double var_s = 0.0;
  double var_b = 0.0;
  double skew_bound_eigenstate = 0.0;
  double skew_bound_partial = 0.0;
  bool bound_tight_expected = false;
  bool bound_tight = false;

  bool commuting_case = false;
  /// D_psi(H) = H: the chosen basis is a joint eigenbasis. Eigenstate moments
  /// of a commuting pair vanish only in this case.
  bool basis_diagonalizes_hamiltonian = false;
  bool ordering_ok = false;
  /// var_s <= skew_bound_partial <= var_q.
  bool bounds_ok = false;
  bool first_moments_zero = false;
  bool skew_identity_ok = false;
  bool formulas_agree = false;
  bool commuting_moments_zero = true;
  bool prob_floor_triggered = false;

  /// Names of the invariant checks that failed; empty when all hold.
  std::vector<std::string> failed_checks() const;
};

/// Requires max_order in [2, kMaxOrder]; throws InvalidArgument otherwise.
FqhReport analyze(const DensityState& rho, const HermitianOperator& hamiltonian,
                  const StateEigenbasis& basis, int max_order = 4);

}  // namespace fqh
