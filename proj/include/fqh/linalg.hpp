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
#include <memory>
#include <span>
#include <vector>

#include "fqh/matrix.hpp"

namespace fqh {

inline constexpr std::size_t kMaxDim = 64;

/// Numerical thresholds shared by every module. `invariant` and `identity` are
/// the slacks used when a report checks its own invariants.
struct Tolerances {
  double hermiticity = 1e-10;
  double trace = 1e-9;
  double psd = 1e-9;
  /// Relative clustering threshold; absolute value is cluster_rel * max(1, |op|_F).
  double cluster_rel = 1e-8;
  double prob_floor = 1e-12;
  double invariant = 1e-9;
  double identity = 1e-8;

  Tolerances scaled(double factor) const;
  /// Defaults multiplied by FQH_TOLERANCE_SCALE when it is set.
  static Tolerances from_environment();
};

struct Eigensystem {
  std::vector<double> values;  // ascending
  std::vector<ComplexVector> vectors;
};

struct SpectralCluster {
  double eigenvalue = 0.0;
  std::size_t multiplicity = 0;
  ComplexMatrix projector;
  std::vector<ComplexVector> eigenvectors;
};

/// A self-adjoint operator as sum_i eigenvalue_i * projector_i, eigenvalues
/// ascending and separated by more than `cluster_tol`.
struct SpectralDecomposition {
  std::vector<SpectralCluster> clusters;
  double cluster_tol = 0.0;

  std::size_t dim() const;
  ComplexMatrix reconstruct() const;
  std::vector<ComplexVector> basis() const;
};

class HermitianOperator {
 public:
  /// Throws NonHermitian when max |a_ij - conj(a_ji)| exceeds the tolerance,
  /// Unsupported beyond kMaxDim. The stored matrix is the Hermitian part.
  explicit HermitianOperator(const ComplexMatrix& matrix, const Tolerances& tol = {});

  const ComplexMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return matrix_.dim(); }
  const Tolerances& tolerances() const { return tol_; }
  double default_cluster_tol() const;

  /// Decomposition at the default clustering tolerance, computed once and
  /// shared between copies.
  const SpectralDecomposition& spectrum() const;

 private:
  struct Cache;
  ComplexMatrix matrix_;
  Tolerances tol_;
  std::shared_ptr<Cache> cache_;
};

/// Unit-trace positive semidefinite operator.
class DensityState {
 public:
  /// Throws InvalidState naming the violated trace or positivity bound.
  explicit DensityState(const HermitianOperator& op);
  explicit DensityState(const ComplexMatrix& matrix, const Tolerances& tol = {});

  /// Normalizes a completely positive map output without revalidating; the
  /// caller guarantees positivity by construction.
  static DensityState from_cp_output(const ComplexMatrix& unnormalized, double trace,
                                     const Tolerances& tol);

  const HermitianOperator& op() const { return op_; }
  const ComplexMatrix& matrix() const { return op_.matrix(); }
  std::size_t dim() const { return op_.dim(); }
  const SpectralDecomposition& spectrum() const { return op_.spectrum(); }

 private:
  struct Trusted {};
  DensityState(const HermitianOperator& op, Trusted) : op_(op) {}
  HermitianOperator op_;
};

/// Cyclic complex Jacobi. Throws NoConvergence past the sweep budget.
Eigensystem eigh(const HermitianOperator& op);

/// Single-linkage clustering of the sorted spectrum at absolute `cluster_tol`.
SpectralDecomposition spectral_decomposition(const HermitianOperator& op, double cluster_tol);

/// sum_i P_i b P_i
ComplexMatrix pinch(const SpectralDecomposition& decomp, const ComplexMatrix& b);

/// Throws IncompleteBasis unless the vectors resolve the identity within `tol`.
void require_complete_basis(std::span<const ComplexVector> basis, std::size_t dim,
                            double tol = 1e-8);

/// sum_k |v_k><v_k| b |v_k><v_k|, the diagonal of b in the given basis.
ComplexMatrix rank1_pinch(std::span<const ComplexVector> basis, const ComplexMatrix& b);

/// Principal square root of a PSD operator; eigenvalues in [-psd_tol, 0) are
/// clipped to zero, anything lower throws NotPSD.
ComplexMatrix psd_sqrt(const HermitianOperator& op);

}  // namespace fqh
