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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fqh/linalg.hpp"

namespace fqh {

/// Structured outcome index. Sequential composition concatenates the parts of
/// the two labels, so coarse-graining is a projection onto a subset of parts.
using Label = std::vector<std::size_t>;

std::string to_string(const Label& label);

struct Outcome {
  Label label;
  std::vector<ComplexMatrix> kraus;
};

/// Outcome-indexed family of CP maps in operator-sum form.
class KrausInstrument {
 public:
  /// Throws DimensionMismatch on inconsistent Kraus operators,
  /// InvalidArgument on empty/duplicate outcomes or when sum K^dag K exceeds
  /// the identity by more than 1e-9.
  KrausInstrument(std::size_t dim, std::vector<Outcome> outcomes);

  static KrausInstrument identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  /// Throws UnknownLabel.
  const Outcome& find(const Label& label) const;

  bool is_trace_preserving(double tol = 1e-9) const;

 private:
  std::size_t dim_;
  std::vector<Outcome> outcomes_;
};

/// sum_k K_k x K_k^dag
ComplexMatrix apply_outcome(const Outcome& outcome, const ComplexMatrix& x);

/// sum_x I_x(rho)
ComplexMatrix unselective(const KrausInstrument& inst, const ComplexMatrix& rho);

struct OutcomeStatistics {
  Label label;
  double probability = 0.0;
  /// Absent when the probability does not exceed prob_floor.
  std::optional<DensityState> post_state;
};

std::vector<OutcomeStatistics> apply(const KrausInstrument& inst, const DensityState& rho);

/// Conditional increase in expected energy given outcome `label`:
///   tr[H I_x(rho)] / p  -  Re tr[I_x(H rho + rho H)] / (2 p),
/// the second term being the real part of the weak value of H. Returns 0 when
/// p = tr[I_x(rho)] does not exceed rho's prob_floor.
double conditional_energy_change(const KrausInstrument& inst, const DensityState& rho,
                                 const HermitianOperator& hamiltonian, const Label& label);

/// First `first`, then `second`; labels are (first parts..., second parts...)
/// and Kraus operators are all products K_second * K_first.
KrausInstrument sequential(const KrausInstrument& first, const KrausInstrument& second);

/// Luders instrument with one outcome {i} per spectral projector.
KrausInstrument projective_instrument(const SpectralDecomposition& decomp);

/// One outcome {k} per basis vector. Throws IncompleteBasis.
KrausInstrument rank1_instrument(std::span<const ComplexVector> basis);

/// One outcome {m, mu} per vector of the grouped basis. Throws IncompleteBasis.
KrausInstrument rank1_instrument(const std::vector<std::vector<ComplexVector>>& grouped);

}  // namespace fqh
