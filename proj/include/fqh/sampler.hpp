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
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "fqh/heat.hpp"

namespace fqh {

/// Uniform doubles in [0, 1) from std::mt19937_64, whose output sequence is
/// fixed by the standard for a given seed; the top 53 bits of each draw are
/// scaled by 2^-53, so streams are identical across platforms.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Categorical sampling by inversion of the cumulative sum.
class CategoricalSampler {
 public:
  /// Throws EmptyDistribution when there are no weights or they sum to <= 0.
  explicit CategoricalSampler(std::span<const double> weights);
  std::size_t draw(UniformStream& stream) const;

 private:
  std::vector<double> cumulative_;
};

struct SampleRun {
  Level level = Level::FullCG;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  /// k = 1..max_order
  std::vector<double> empirical_moments;
  std::map<Label, std::size_t> counts;
  /// counts / n_samples
  std::map<Label, double> empirical_probs;
};

/// i.i.d. draws from {p(label)} of a precomputed distribution.
SampleRun sample(const HeatDistribution& dist, std::size_t n, std::uint64_t seed, int max_order = 4);

/// Simulates the measurement record step by step: the first measurement
/// (state eigenbasis, state projectors, or none) is drawn on rho, the energy
/// measurement on the collapsed post-state, and the heat of the record comes
/// from the conditional energy change of the composite instrument.
/// `basis` is used only for Level::Eigenstate and defaults to the eigh basis.
SampleRun sample_sequential(const DensityState& rho, const HermitianOperator& hamiltonian, Level level,
                            std::size_t n, std::uint64_t seed, int max_order = 4,
                            const std::optional<StateEigenbasis>& basis = std::nullopt);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double critical = 0.0;
  bool passed = false;
};

/// Upper `confidence` quantile of the chi-square distribution.
double chi_square_critical(std::size_t dof, double confidence);

/// Goodness of fit of the run against the analytic distribution. Categories
/// with expected count below 5 are pooled; an observation in a zero-probability
/// category fails outright.
ChiSquareResult chi_square_goodness_of_fit(const SampleRun& run, const HeatDistribution& dist,
                                           double confidence = 0.999);

/// Two-sample homogeneity test between runs, pooling sparse categories.
ChiSquareResult chi_square_two_sample(const SampleRun& a, const SampleRun& b, double confidence = 0.999);

}  // namespace fqh
