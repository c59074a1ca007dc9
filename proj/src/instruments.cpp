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

#include "fqh/instruments.hpp"

#include <algorithm>
#include <set>

#include "fqh/error.hpp"

namespace fqh {

namespace {

constexpr double kCompletenessTol = 1e-9;

ComplexMatrix kraus_sum(const std::vector<Outcome>& outcomes, std::size_t dim) {
  ComplexMatrix sum(dim);
  for (const auto& o : outcomes) {
    for (const auto& k : o.kraus) sum += k.adjoint() * k;
  }
  return sum;
}

}  // namespace

std::string to_string(const Label& label) {
  std::string out = "(";
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(label[i]);
  }
  return out + ")";
}

KrausInstrument::KrausInstrument(std::size_t dim, std::vector<Outcome> outcomes)
    : dim_(dim), outcomes_(std::move(outcomes)) {
  if (outcomes_.empty()) throw Error(ErrorCode::InvalidArgument, "instrument has no outcomes");
  std::set<Label> seen;
  for (const auto& o : outcomes_) {
    if (o.kraus.empty()) {
      throw Error(ErrorCode::InvalidArgument, "outcome " + to_string(o.label) + " has no Kraus operators");
    }
    if (!seen.insert(o.label).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate outcome label " + to_string(o.label));
    }
    for (const auto& k : o.kraus) {
      if (k.dim() != dim_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "Kraus operator of outcome " + to_string(o.label) + " has wrong dimension");
      }
    }
  }
  // sum K^dag K <= 1: the largest eigenvalue of the sum must not exceed 1.
  const ComplexMatrix sum = kraus_sum(outcomes_, dim_);
  Tolerances loose;
  loose.hermiticity = 1e-8;
  const double top = eigh(HermitianOperator(sum, loose)).values.back();
  if (top > 1.0 + kCompletenessTol) {
    throw Error(ErrorCode::InvalidArgument, "instrument is not trace-non-increasing");
  }
}

KrausInstrument KrausInstrument::identity(std::size_t dim) {
  return KrausInstrument(dim, {Outcome{{0}, {ComplexMatrix::identity(dim)}}});
}

const Outcome& KrausInstrument::find(const Label& label) const {
  for (const auto& o : outcomes_) {
    if (o.label == label) return o;
  }
  throw Error(ErrorCode::UnknownLabel, "no outcome labelled " + to_string(label));
}

bool KrausInstrument::is_trace_preserving(double tol) const {
  return max_abs_diff(kraus_sum(outcomes_, dim_), ComplexMatrix::identity(dim_)) <= tol;
}

ComplexMatrix apply_outcome(const Outcome& outcome, const ComplexMatrix& x) {
  ComplexMatrix out(x.dim());
  for (const auto& k : outcome.kraus) out += k * x * k.adjoint();
  return out;
}

ComplexMatrix unselective(const KrausInstrument& inst, const ComplexMatrix& rho) {
  if (rho.dim() != inst.dim()) throw Error(ErrorCode::DimensionMismatch, "state/instrument dimension");
  ComplexMatrix out(rho.dim());
  for (const auto& o : inst.outcomes()) out += apply_outcome(o, rho);
  return out;
}

std::vector<OutcomeStatistics> apply(const KrausInstrument& inst, const DensityState& rho) {
  if (rho.dim() != inst.dim()) throw Error(ErrorCode::DimensionMismatch, "state/instrument dimension");
  const Tolerances& tol = rho.op().tolerances();
  std::vector<OutcomeStatistics> out;
  out.reserve(inst.outcomes().size());
  for (const auto& o : inst.outcomes()) {
    const ComplexMatrix image = apply_outcome(o, rho.matrix());
    OutcomeStatistics stats;
    stats.label = o.label;
    stats.probability = std::max(0.0, image.trace().real());
    if (stats.probability > tol.prob_floor) {
      stats.post_state = DensityState::from_cp_output(image, stats.probability, tol);
    }
    out.push_back(std::move(stats));
  }
  return out;
}

double conditional_energy_change(const KrausInstrument& inst, const DensityState& rho,
                                 const HermitianOperator& hamiltonian, const Label& label) {
  if (rho.dim() != inst.dim() || hamiltonian.dim() != inst.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "state/hamiltonian/instrument dimension");
  }
  const Outcome& outcome = inst.find(label);
  const ComplexMatrix& h = hamiltonian.matrix();
  const ComplexMatrix image = apply_outcome(outcome, rho.matrix());
  const double p = image.trace().real();
  if (!(p > rho.op().tolerances().prob_floor)) return 0.0;

  const double post_energy = trace_product(h, image).real();
  const ComplexMatrix anticommutator = h * rho.matrix() + rho.matrix() * h;
  const double weak_value = 0.5 * apply_outcome(outcome, anticommutator).trace().real();
  return (post_energy - weak_value) / p;
}

KrausInstrument sequential(const KrausInstrument& first, const KrausInstrument& second) {
  if (first.dim() != second.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "sequential: instrument dimensions differ");
  }
  std::vector<Outcome> composite;
  composite.reserve(first.outcomes().size() * second.outcomes().size());
  for (const auto& a : first.outcomes()) {
    for (const auto& b : second.outcomes()) {
      Outcome o;
      o.label = a.label;
      o.label.insert(o.label.end(), b.label.begin(), b.label.end());
      for (const auto& kb : b.kraus) {
        for (const auto& ka : a.kraus) o.kraus.push_back(kb * ka);
      }
      composite.push_back(std::move(o));
    }
  }
  return KrausInstrument(first.dim(), std::move(composite));
}

KrausInstrument projective_instrument(const SpectralDecomposition& decomp) {
  ComplexMatrix sum(decomp.dim());
  std::vector<Outcome> outcomes;
  for (std::size_t i = 0; i < decomp.clusters.size(); ++i) {
    sum += decomp.clusters[i].projector;
    outcomes.push_back(Outcome{{i}, {decomp.clusters[i].projector}});
  }
  if (max_abs_diff(sum, ComplexMatrix::identity(decomp.dim())) > 1e-8) {
    throw Error(ErrorCode::IncompleteBasis, "projectors do not resolve the identity");
  }
  return KrausInstrument(decomp.dim(), std::move(outcomes));
}

KrausInstrument rank1_instrument(std::span<const ComplexVector> basis) {
  const std::size_t dim = basis.empty() ? 0 : basis.front().size();
  require_complete_basis(basis, dim);
  std::vector<Outcome> outcomes;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    outcomes.push_back(Outcome{{k}, {ComplexMatrix::projector(basis[k])}});
  }
  return KrausInstrument(dim, std::move(outcomes));
}

KrausInstrument rank1_instrument(const std::vector<std::vector<ComplexVector>>& grouped) {
  std::vector<ComplexVector> flat;
  std::vector<Outcome> outcomes;
  for (std::size_t m = 0; m < grouped.size(); ++m) {
    for (std::size_t mu = 0; mu < grouped[m].size(); ++mu) {
      flat.push_back(grouped[m][mu]);
      outcomes.push_back(Outcome{{m, mu}, {ComplexMatrix::projector(grouped[m][mu])}});
    }
  }
  const std::size_t dim = flat.empty() ? 0 : flat.front().size();
  require_complete_basis(flat, dim);
  return KrausInstrument(dim, std::move(outcomes));
}

}  // namespace fqh
