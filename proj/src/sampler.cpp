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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "fqh/error.hpp"

namespace fqh {

namespace {

constexpr double kMinExpected = 5.0;

void require_samples(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
}

std::vector<double> moments_from_counts(const std::vector<std::pair<double, std::size_t>>& heat_counts,
                                        std::size_t n, int max_order) {
  std::vector<double> moments(static_cast<std::size_t>(max_order), 0.0);
  for (const auto& [heat, count] : heat_counts) {
    if (count == 0) continue;
    double term = static_cast<double>(count);
    for (int k = 0; k < max_order; ++k) {
      term *= heat;
      moments[static_cast<std::size_t>(k)] += term;
    }
  }
  for (auto& m : moments) m /= static_cast<double>(n);
  return moments;
}

void fill_probs(SampleRun& run) {
  for (const auto& [label, count] : run.counts) {
    run.empirical_probs[label] = static_cast<double>(count) / static_cast<double>(run.n_samples);
  }
}

// Merges bins whose expected count is below kMinExpected, smallest first,
// until every bin reaches the threshold or a single bin remains.
std::vector<std::pair<double, double>> pool_bins(std::vector<std::pair<double, double>> bins) {
  std::sort(bins.begin(), bins.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  while (bins.size() > 1 && bins.front().first < kMinExpected) {
    auto smallest = bins.front();
    bins.erase(bins.begin());
    bins.front().first += smallest.first;
    bins.front().second += smallest.second;
    std::sort(bins.begin(), bins.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return bins;
}

ChiSquareResult finish(double statistic, std::size_t bins, double confidence) {
  ChiSquareResult r;
  r.statistic = statistic;
  r.dof = bins > 0 ? bins - 1 : 0;
  if (r.dof == 0) {
    r.passed = statistic == 0.0;
    return r;
  }
  r.critical = chi_square_critical(r.dof, confidence);
  r.passed = statistic <= r.critical;
  return r;
}

}  // namespace

CategoricalSampler::CategoricalSampler(std::span<const double> weights) {
  double total = 0.0;
  cumulative_.reserve(weights.size());
  for (double w : weights) {
    total += std::max(w, 0.0);
    cumulative_.push_back(total);
  }
  if (cumulative_.empty() || !(total > 0.0)) {
    throw Error(ErrorCode::EmptyDistribution, "cannot sample from an empty distribution");
  }
}

std::size_t CategoricalSampler::draw(UniformStream& stream) const {
  const double u = stream.next() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  // u < total, so the iterator is in range; the clamp guards rounding at the top.
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

SampleRun sample(const HeatDistribution& dist, std::size_t n, std::uint64_t seed, int max_order) {
  require_samples(n);
  std::vector<double> weights;
  for (const auto& e : dist.entries) weights.push_back(e.probability);
  const CategoricalSampler sampler(weights);

  UniformStream stream(seed);
  std::vector<std::size_t> counts(dist.entries.size(), 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[sampler.draw(stream)];

  SampleRun run;
  run.level = dist.level;
  run.seed = seed;
  run.n_samples = n;
  std::vector<std::pair<double, std::size_t>> heat_counts;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    heat_counts.emplace_back(dist.entries[i].heat, counts[i]);
    if (counts[i] > 0) run.counts[dist.entries[i].label] += counts[i];
  }
  run.empirical_moments = moments_from_counts(heat_counts, n, max_order);
  fill_probs(run);
  return run;
}

SampleRun sample_sequential(const DensityState& rho, const HermitianOperator& hamiltonian, Level level,
                            std::size_t n, std::uint64_t seed, int max_order,
                            const std::optional<StateEigenbasis>& basis) {
  require_samples(n);
  if (rho.dim() != hamiltonian.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "state and hamiltonian dimensions differ");
  }

  std::vector<std::vector<ComplexVector>> energy_basis;
  for (const auto& c : hamiltonian.spectrum().clusters) energy_basis.push_back(c.eigenvectors);

  std::optional<KrausInstrument> first;
  KrausInstrument second = projective_instrument(hamiltonian.spectrum());
  switch (level) {
    case Level::Eigenstate:
      first = rank1_instrument(basis ? basis->vectors : default_eigenbasis(rho).vectors);
      second = rank1_instrument(energy_basis);
      break;
    case Level::PartialCG:
      first = projective_instrument(rho.spectrum());
      break;
    case Level::FullCG:
      break;
  }
  const KrausInstrument composite = first ? sequential(*first, second) : second;

  // First step: outcome statistics on rho. Without a first measurement the
  // record starts from rho itself.
  std::vector<Label> first_labels;
  std::vector<double> first_probs;
  std::vector<DensityState> post_states;
  if (first) {
    for (auto& s : apply(*first, rho)) {
      first_labels.push_back(s.label);
      first_probs.push_back(s.post_state ? s.probability : 0.0);
      post_states.push_back(s.post_state ? *s.post_state : rho);
    }
  } else {
    first_labels.emplace_back();
    first_probs.push_back(1.0);
    post_states.push_back(rho);
  }
  const CategoricalSampler first_sampler(first_probs);

  // Second step: energy measurement on each collapsed state.
  std::vector<std::vector<Label>> second_labels(first_labels.size());
  std::vector<std::optional<CategoricalSampler>> second_samplers(first_labels.size());
  for (std::size_t i = 0; i < first_labels.size(); ++i) {
    if (first_probs[i] <= 0.0) continue;
    std::vector<double> probs;
    for (auto& s : apply(second, post_states[i])) {
      second_labels[i].push_back(s.label);
      probs.push_back(s.probability);
    }
    second_samplers[i].emplace(probs);
  }

  UniformStream stream(seed);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index_counts;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = first_sampler.draw(stream);
    const std::size_t j = second_samplers[i]->draw(stream);
    ++index_counts[{i, j}];
  }

  SampleRun run;
  run.level = level;
  run.seed = seed;
  run.n_samples = n;
  std::vector<std::pair<double, std::size_t>> heat_counts;
  for (const auto& [ij, count] : index_counts) {
    Label label = first_labels[ij.first];
    const Label& tail = second_labels[ij.first][ij.second];
    label.insert(label.end(), tail.begin(), tail.end());
    heat_counts.emplace_back(conditional_energy_change(composite, rho, hamiltonian, label), count);
    run.counts[label] += count;
  }
  run.empirical_moments = moments_from_counts(heat_counts, n, max_order);
  fill_probs(run);
  return run;
}

double chi_square_critical(std::size_t dof, double confidence) {
  if (dof == 0) throw Error(ErrorCode::InvalidArgument, "chi-square needs at least one degree of freedom");
  const boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::quantile(dist, confidence);
}

ChiSquareResult chi_square_goodness_of_fit(const SampleRun& run, const HeatDistribution& dist,
                                           double confidence) {
  const double n = static_cast<double>(run.n_samples);
  std::map<Label, double> expected;
  for (const auto& e : dist.entries) expected[e.label] += e.probability;

  std::vector<std::pair<double, double>> bins;  // (expected, observed)
  for (const auto& [label, p] : expected) {
    const auto it = run.counts.find(label);
    const double observed = it == run.counts.end() ? 0.0 : static_cast<double>(it->second);
    if (p <= 0.0) {
      if (observed > 0.0) return finish(std::numeric_limits<double>::infinity(), 2, confidence);
      continue;
    }
    bins.emplace_back(n * p, observed);
  }
  for (const auto& [label, count] : run.counts) {
    if (!expected.contains(label) && count > 0) {
      return finish(std::numeric_limits<double>::infinity(), 2, confidence);
    }
  }

  bins = pool_bins(std::move(bins));
  double statistic = 0.0;
  for (const auto& [e, o] : bins) statistic += (o - e) * (o - e) / e;
  return finish(statistic, bins.size(), confidence);
}

ChiSquareResult chi_square_two_sample(const SampleRun& a, const SampleRun& b, double confidence) {
  const double na = static_cast<double>(a.n_samples);
  const double nb = static_cast<double>(b.n_samples);
  std::set<Label> labels;
  for (const auto& [l, c] : a.counts) labels.insert(l);
  for (const auto& [l, c] : b.counts) labels.insert(l);

  // Bins keyed by the pooled count (a + b) so sparse categories merge.
  std::vector<std::pair<double, double>> bins;  // (a + b, a)
  for (const auto& l : labels) {
    const auto ia = a.counts.find(l);
    const auto ib = b.counts.find(l);
    const double ca = ia == a.counts.end() ? 0.0 : static_cast<double>(ia->second);
    const double cb = ib == b.counts.end() ? 0.0 : static_cast<double>(ib->second);
    bins.emplace_back(ca + cb, ca);
  }
  bins = pool_bins(std::move(bins));

  const double ra = std::sqrt(nb / na);
  const double rb = std::sqrt(na / nb);
  double statistic = 0.0;
  for (const auto& [total, ca] : bins) {
    const double cb = total - ca;
    const double d = ra * ca - rb * cb;
    statistic += d * d / total;
  }
  return finish(statistic, bins.size(), confidence);
}

}  // namespace fqh
