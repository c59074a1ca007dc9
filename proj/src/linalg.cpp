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

#include "fqh/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <string>

#include "fqh/error.hpp"

namespace fqh {

namespace {

constexpr int kMaxSweeps = 100;

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) {
      if (i != j) s += std::norm(a(i, j));
    }
  }
  return std::sqrt(s);
}

// Fixes the phase so the largest-modulus component is real and positive.
void normalize_phase(ComplexVector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best]) + 1e-12) best = i;
  }
  if (v.empty() || std::abs(v[best]) == 0.0) return;
  const Complex phase = std::conj(v[best]) / std::abs(v[best]);
  for (auto& z : v) z *= phase;
}

}  // namespace

Tolerances Tolerances::scaled(double factor) const {
  Tolerances t = *this;
  t.hermiticity *= factor;
  t.trace *= factor;
  t.psd *= factor;
  t.cluster_rel *= factor;
  t.prob_floor *= factor;
  t.invariant *= factor;
  t.identity *= factor;
  return t;
}

Tolerances Tolerances::from_environment() {
  const char* raw = std::getenv("FQH_TOLERANCE_SCALE");
  if (raw == nullptr || *raw == '\0') return {};
  char* end = nullptr;
  const double factor = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("FQH_TOLERANCE_SCALE must be a positive number, got '") + raw + "'");
  }
  return Tolerances{}.scaled(factor);
}

std::size_t SpectralDecomposition::dim() const {
  return clusters.empty() ? 0 : clusters.front().projector.dim();
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  ComplexMatrix m(dim());
  for (const auto& c : clusters) m += c.projector * Complex(c.eigenvalue);
  return m;
}

std::vector<ComplexVector> SpectralDecomposition::basis() const {
  std::vector<ComplexVector> out;
  for (const auto& c : clusters) out.insert(out.end(), c.eigenvectors.begin(), c.eigenvectors.end());
  return out;
}

struct HermitianOperator::Cache {
  std::once_flag once;
  std::unique_ptr<SpectralDecomposition> value;
};

HermitianOperator::HermitianOperator(const ComplexMatrix& matrix, const Tolerances& tol)
    : matrix_(matrix.dim()), tol_(tol), cache_(std::make_shared<Cache>()) {
  const std::size_t n = matrix.dim();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "operator has dimension 0");
  if (n > kMaxDim) {
    throw Error(ErrorCode::Unsupported,
                "dimension " + std::to_string(n) + " exceeds " + std::to_string(kMaxDim));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(matrix(i, j) - std::conj(matrix(j, i))));
      matrix_(i, j) = 0.5 * (matrix(i, j) + std::conj(matrix(j, i)));
    }
  }
  if (!(worst <= tol.hermiticity)) {
    throw Error(ErrorCode::NonHermitian, "hermiticity violated: max |a_ij - conj(a_ji)| = " +
                                             fmt_double(worst) + " > " +
                                             fmt_double(tol.hermiticity));
  }
}

double HermitianOperator::default_cluster_tol() const {
  return tol_.cluster_rel * std::max(1.0, matrix_.frobenius_norm());
}

const SpectralDecomposition& HermitianOperator::spectrum() const {
  std::call_once(cache_->once, [this] {
    cache_->value = std::make_unique<SpectralDecomposition>(
        spectral_decomposition(*this, default_cluster_tol()));
  });
  return *cache_->value;
}

DensityState::DensityState(const HermitianOperator& op) : op_(op) {
  const Tolerances& tol = op_.tolerances();
  const double tr = op_.matrix().trace().real();
  if (!(std::abs(tr - 1.0) <= tol.trace)) {
    throw Error(ErrorCode::InvalidState, "trace violated: tr[rho] = " + fmt_double(tr));
  }
  const double smallest = op_.spectrum().clusters.front().eigenvalue;
  if (!(smallest >= -tol.psd)) {
    throw Error(ErrorCode::InvalidState,
                "positivity violated: smallest eigenvalue " + fmt_double(smallest));
  }
}

DensityState::DensityState(const ComplexMatrix& matrix, const Tolerances& tol)
    : DensityState(HermitianOperator(matrix, tol)) {}

DensityState DensityState::from_cp_output(const ComplexMatrix& unnormalized, double trace,
                                          const Tolerances& tol) {
  Tolerances loose = tol;
  loose.hermiticity = std::numeric_limits<double>::infinity();
  return DensityState(HermitianOperator(unnormalized * Complex(1.0 / trace), loose), Trusted{});
}

Eigensystem eigh(const HermitianOperator& op) {
  const std::size_t n = op.dim();
  ComplexMatrix a = op.matrix();
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = a.frobenius_norm();

  if (scale > 0.0) {
    const double stop = 1e-15 * scale;
    const double negligible = 1e-18 * scale;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
      if (off_diagonal_norm(a) <= stop) {
        converged = true;
        break;
      }
      bool rotated = false;
      for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const Complex g = a(p, q);
          const double abs_g = std::abs(g);
          if (abs_g <= negligible) {
            a(p, q) = a(q, p) = 0.0;
            continue;
          }
          rotated = true;
          const Complex phase = std::conj(g) / abs_g;  // makes a_pq real after D^H A D
          const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * abs_g);
          const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;
          // J = D R with R the real rotation [[c, s], [-s, c]].
          const Complex jpp = c, jpq = s, jqp = -s * phase, jqq = c * phase;

          for (std::size_t k = 0; k < n; ++k) {
            const Complex akp = a(k, p), akq = a(k, q);
            a(k, p) = akp * jpp + akq * jqp;
            a(k, q) = akp * jpq + akq * jqq;
            const Complex vkp = v(k, p), vkq = v(k, q);
            v(k, p) = vkp * jpp + vkq * jqp;
            v(k, q) = vkp * jpq + vkq * jqq;
          }
          for (std::size_t k = 0; k < n; ++k) {
            const Complex apk = a(p, k), aqk = a(q, k);
            a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
            a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
          }
          a(p, q) = a(q, p) = 0.0;
          a(p, p) = a(p, p).real();
          a(q, q) = a(q, q).real();
        }
      }
      if (!rotated) converged = true;
    }
    if (!converged && off_diagonal_norm(a) > stop) {
      throw Error(ErrorCode::NoConvergence,
                  "Jacobi eigensolver exceeded " + std::to_string(kMaxSweeps) + " sweeps");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  Eigensystem out;
  out.values.reserve(n);
  out.vectors.reserve(n);
  for (std::size_t idx : order) {
    out.values.push_back(a(idx, idx).real());
    ComplexVector col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v(k, idx);
    normalize_phase(col);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

SpectralDecomposition spectral_decomposition(const HermitianOperator& op, double cluster_tol) {
  if (!(cluster_tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "cluster_tol must be >= 0");
  const Eigensystem es = eigh(op);
  const std::size_t n = op.dim();

  SpectralDecomposition decomp;
  decomp.cluster_tol = cluster_tol;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && es.values[end] - es.values[end - 1] <= cluster_tol) ++end;

    SpectralCluster cluster;
    cluster.multiplicity = end - start;
    cluster.projector = ComplexMatrix(n);
    double sum = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      sum += es.values[k];
      cluster.projector += ComplexMatrix::projector(es.vectors[k]);
      cluster.eigenvectors.push_back(es.vectors[k]);
    }
    cluster.eigenvalue = sum / static_cast<double>(cluster.multiplicity);
    decomp.clusters.push_back(std::move(cluster));
    start = end;
  }
  return decomp;
}

ComplexMatrix pinch(const SpectralDecomposition& decomp, const ComplexMatrix& b) {
  if (decomp.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "pinch: decomposition and operand dimensions differ");
  }
  ComplexMatrix out(b.dim());
  for (const auto& c : decomp.clusters) out += c.projector * b * c.projector;
  return out;
}

void require_complete_basis(std::span<const ComplexVector> basis, std::size_t dim, double tol) {
  if (basis.size() != dim) {
    throw Error(ErrorCode::IncompleteBasis, "basis has " + std::to_string(basis.size()) +
                                                " vectors, dimension is " + std::to_string(dim));
  }
  ComplexMatrix sum(dim);
  for (const auto& v : basis) {
    if (v.size() != dim) throw Error(ErrorCode::DimensionMismatch, "basis vector size mismatch");
    sum += ComplexMatrix::projector(v);
  }
  const double err = max_abs_diff(sum, ComplexMatrix::identity(dim));
  if (!(err <= tol)) {
    throw Error(ErrorCode::IncompleteBasis,
                "basis does not resolve the identity: deviation " + fmt_double(err));
  }
}

ComplexMatrix rank1_pinch(std::span<const ComplexVector> basis, const ComplexMatrix& b) {
  require_complete_basis(basis, b.dim());
  ComplexMatrix out(b.dim());
  for (const auto& v : basis) out += ComplexMatrix::projector(v) * expectation(b, v);
  return out;
}

ComplexMatrix psd_sqrt(const HermitianOperator& op) {
  const Eigensystem es = eigh(op);
  const double psd_tol = op.tolerances().psd;
  double top = 0.0;
  for (double v : es.values) top = std::max(top, std::abs(v));
  // Eigenvalues inside the solver's roundoff are zero; their square roots
  // would otherwise surface as O(sqrt(eps)) errors.
  const double noise = static_cast<double>(op.dim()) * std::numeric_limits<double>::epsilon() * top;
  ComplexMatrix out(op.dim());
  for (std::size_t k = 0; k < es.values.size(); ++k) {
    double lambda = es.values[k];
    if (lambda < -psd_tol) {
      throw Error(ErrorCode::NotPSD, "operator has eigenvalue " + fmt_double(lambda));
    }
    if (lambda <= noise) continue;
    out += ComplexMatrix::projector(es.vectors[k]) * Complex(std::sqrt(lambda));
  }
  return out;
}

}  // namespace fqh
