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

#include "fqh/sampler.hpp"

#include <cmath>
#include <random>

#include "fqh/error.hpp"
#include "fqh/problem.hpp"
#include "gtest/gtest.h"
#include "test_support.hpp"

using namespace fqh;
using fqh::fixtures::Rng;

namespace {

const double kR = 1.0 / std::sqrt(2.0);

HeatDistribution mixed_qubit_eigenstate() {
  const DensityState rho(ComplexMatrix::identity(2) * Complex(0.5));
  const HermitianOperator h(ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0}));
  const std::vector<ComplexVector> v{{kR, kR}, {kR, -kR}};
  return eigenstate_distribution(rho, h, eigenbasis_from_vectors(rho, v));
}

}  // namespace

TEST(UniformStream, matches_reference_engine) {
  UniformStream s(42);
  std::mt19937_64 ref(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = s.next();
    EXPECT_EQ(u, static_cast<double>(ref() >> 11) / 9007199254740992.0);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(CategoricalSampler, rejects_empty_and_zero_weights) {
  const std::vector<double> none;
  const std::vector<double> zeros{0.0, 0.0};
  EXPECT_THROW(CategoricalSampler{none}, Error);
  try {
    CategoricalSampler{zeros};
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyDistribution);
  }
}

TEST(CategoricalSampler, never_draws_zero_weight_category) {
  const std::vector<double> w{0.0, 0.3, 0.0, 0.7, 0.0};
  const CategoricalSampler s(w);
  UniformStream stream(7);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t k = s.draw(stream);
    EXPECT_TRUE(k == 1 || k == 3) << k;
  }
}

TEST(Sample, full_coarse_graining_has_zero_moments) {
  const Problem p = two_qubit_example();
  const SampleRun run = sample(full_cg_distribution(p.rho, p.hamiltonian), 1000, 3);
  for (double m : run.empirical_moments) EXPECT_EQ(m, 0.0);
}

TEST(Sample, mixed_qubit_variance_band) {
  const SampleRun run = sample(mixed_qubit_eigenstate(), 100000, 42);
  const double var = run.empirical_moments[1] - run.empirical_moments[0] * run.empirical_moments[0];
  EXPECT_NEAR(var, 1.0, 0.02);
  double total = 0.0;
  for (const auto& [label, p] : run.empirical_probs) total += p;
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Sample, two_qubit_partial_variance) {
  const Problem p = two_qubit_example();
  const SampleRun run = sample(partial_cg_distribution(p.rho, p.hamiltonian), 1000000, 42);
  const double var = run.empirical_moments[1] - run.empirical_moments[0] * run.empirical_moments[0];
  EXPECT_NEAR(var, 4.6, 0.05);
}

TEST(Sample, deterministic_given_seed) {
  const Problem p = two_qubit_example();
  const HeatDistribution d = partial_cg_distribution(p.rho, p.hamiltonian);
  const SampleRun a = sample(d, 5000, 9);
  const SampleRun b = sample(d, 5000, 9);
  const SampleRun c = sample(d, 5000, 10);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.empirical_moments, b.empirical_moments);
  EXPECT_NE(a.counts, c.counts);
}

TEST(Sample, rejects_zero_samples) { EXPECT_THROW(sample(mixed_qubit_eigenstate(), 0, 1), Error); }

TEST(SampleSequential, agrees_with_direct_sampling) {
  const Problem p = two_qubit_example();
  const StateEigenbasis basis = default_eigenbasis(p.rho);
  const std::pair<Level, HeatDistribution> cases[] = {
      {Level::Eigenstate, eigenstate_distribution(p.rho, p.hamiltonian, basis)},
      {Level::PartialCG, partial_cg_distribution(p.rho, p.hamiltonian)},
      {Level::FullCG, full_cg_distribution(p.rho, p.hamiltonian)},
  };
  for (const auto& [level, dist] : cases) {
    const SampleRun direct = sample(dist, 100000, 1);
    const SampleRun seq = sample_sequential(p.rho, p.hamiltonian, level, 100000, 2, 4, basis);
    const ChiSquareResult two = chi_square_two_sample(direct, seq);
    EXPECT_TRUE(two.passed) << to_string(level) << " stat=" << two.statistic << " crit=" << two.critical;
    EXPECT_TRUE(chi_square_goodness_of_fit(seq, dist).passed) << to_string(level);
    const auto analytic = moments_enumerated(dist, 4);
    const double var_seq = seq.empirical_moments[1] - seq.empirical_moments[0] * seq.empirical_moments[0];
    EXPECT_NEAR(var_seq, analytic[1], 0.1) << to_string(level);
  }
}

TEST(SampleSequential, full_level_heat_is_numerically_zero) {
  const Problem p = two_qubit_example();
  const SampleRun run = sample_sequential(p.rho, p.hamiltonian, Level::FullCG, 2000, 5);
  for (double m : run.empirical_moments) EXPECT_NEAR(m, 0.0, 1e-10);
}

TEST(ChiSquare, critical_values) {
  // Reference quantiles of the chi-square distribution at 0.999.
  EXPECT_NEAR(chi_square_critical(1, 0.999), 10.827566170662733, 1e-9);
  EXPECT_NEAR(chi_square_critical(10, 0.999), 29.588298445074418, 1e-9);
}

TEST(ChiSquare, observation_in_zero_probability_category_fails) {
  HeatDistribution d;
  d.entries = {{{0}, 1.0, 0.0}, {{1}, 0.0, 0.0}};
  SampleRun run;
  run.n_samples = 10;
  run.counts = {{{0}, 9}, {{1}, 1}};
  const ChiSquareResult r = chi_square_goodness_of_fit(run, d);
  EXPECT_FALSE(r.passed);
  EXPECT_TRUE(std::isinf(r.statistic));
}

// Goodness of fit on 20 random instances at the 99.9% level. A single failing
// instance is rerun once with a fresh seed before the test fails.
TEST(ChiSquare, goodness_of_fit_on_random_instances) {
  Rng rng(555);
  int reruns = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<std::size_t>(rng.integer(2, 6));
    const fixtures::Instance inst = fixtures::random_instance(rng, n, trial % 2 == 0, trial % 3 == 0);
    const DensityState rho(inst.rho, Tolerances{.hermiticity = 1e-9});
    const HermitianOperator h(inst.hamiltonian, Tolerances{.hermiticity = 1e-9});
    const HeatDistribution dist = trial % 2 == 0 ? partial_cg_distribution(rho, h)
                                                 : eigenstate_distribution(rho, h, default_eigenbasis(rho));
    const auto seed = static_cast<std::uint64_t>(1000 + trial);
    ChiSquareResult r = chi_square_goodness_of_fit(sample(dist, 100000, seed), dist);
    if (!r.passed) {
      ++reruns;
      r = chi_square_goodness_of_fit(sample(dist, 100000, seed + 7919), dist);
    }
    EXPECT_TRUE(r.passed) << "trial " << trial << " stat=" << r.statistic << " crit=" << r.critical;
  }
  EXPECT_LE(reruns, 1);
}
