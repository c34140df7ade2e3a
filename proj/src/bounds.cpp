// Copyright 2026 The cosmf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cosmf/bounds.hpp"

#include "cosmf/error.hpp"
#include "cosmf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cosmf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_guard(Index n, const char* what) {
  require(n >= 1, ErrorCode::kInvalidArgument, std::string(what) + ": needs at least one column");
  require(n <= kEnumerationGuard, ErrorCode::kInvalidArgument,
          std::string(what) + ": " + std::to_string(n) + " columns exceeds the enumeration guard of " +
              std::to_string(kEnumerationGuard));
}

double rank_ratio(const Matrix& m, Index rank) {
  if (rank < 1 || std::min(m.rows(), m.cols()) < rank) return 0.0;
  Vector s = singular_values(m);
  return s(0) > 0.0 ? s(rank - 1) / s(0) : 0.0;
}

// Index of the column of `m` closest to e_t in max-norm, with that distance.
std::pair<Index, double> nearest_unit_column(const Matrix& m, Index t) {
  Index best = -1;
  double best_dev = kInf;
  for (Index c = 0; c < m.cols(); ++c) {
    Vector d = m.col(c);
    d(t) -= 1.0;
    const double dev = d.cwiseAbs().maxCoeff();
    if (dev < best_dev) {
      best_dev = dev;
      best = c;
    }
  }
  return {best, best_dev};
}

}  // namespace

int kruskal_rank(const Matrix& a_prime, double tol) {
  const Index n = a_prime.cols();
  check_guard(n, "kruskal_rank");
  const double threshold = tol * sigma_max(a_prime);
  if (!(threshold > 0.0)) return 0;
  const Index limit = std::min(a_prime.rows(), n);
  for (Index k = 1; k <= limit; ++k) {
    const bool independent = for_each_subset(n, k, [&](std::span<const Index> cols) {
      return sigma_min(select_columns(a_prime, cols)) > threshold;
    });
    if (!independent) return static_cast<int>(k - 1);
  }
  return static_cast<int>(limit);
}

double epsilon_of(const Matrix& endmembers) {
  const Index n = endmembers.cols();
  require(n >= 2, ErrorCode::kInvalidArgument, "epsilon_of: needs N >= 2");
  const double inv_n = 1.0 / static_cast<double>(n);
  double eps = 0.0;
  for (Index i = 0; i < n; ++i) {
    bool eligible = false;
    for (Index k = 0; k < endmembers.rows(); ++k) eligible = eligible || endmembers(k, i) < inv_n;
    if (!eligible) return kInf;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      double eps_ji = kInf;
      for (Index k = 0; k < endmembers.rows(); ++k) {
        const double a_ki = endmembers(k, i);
        if (!(a_ki < inv_n)) continue;
        eps_ji = std::min(eps_ji, (1.0 - endmembers(k, j)) / (1.0 - static_cast<double>(n) * a_ki));
      }
      eps = std::max(eps, eps_ji);
    }
  }
  return eps;
}

double kappa_of(const Matrix& a_prime, double tol) {
  const Index n = a_prime.cols();
  check_guard(n, "kappa_of");
  const double floor = tol * sigma_max(a_prime);
  double kappa = 0.0;
  for (Index k = 1; k <= n; ++k) {
    for_each_subset(n, k, [&](std::span<const Index> cols) {
      const std::vector<Index> rest = complement(n, cols);
      const double num = sigma_max(select_columns(a_prime, rest));
      if (num == 0.0) return true;
      const double den = sigma_min(select_columns(a_prime, cols));
      kappa = den > floor ? std::max(kappa, num / den) : kInf;
      return std::isfinite(kappa);
    });
    if (!std::isfinite(kappa)) return kInf;
  }
  return kappa;
}

double c_of(int n, int k) {
  require(n >= 2, ErrorCode::kInvalidArgument, "c_of: needs N >= 2");
  require(k >= 1 && k <= n, ErrorCode::kInvalidArgument, "c_of: needs 1 <= K <= N");
  if (2 * k >= n) return static_cast<double>(n) / 2.0;
  return std::sqrt(static_cast<double>(k) * static_cast<double>(n - k));
}

Vector gamma_of(const SpatialResponse& spatial) {
  Vector gamma = Vector::Zero(spatial.sr_pixels());
  for (const Window& w : spatial.windows())
    for (std::size_t k = 0; k < w.pixels.size(); ++k)
      gamma(w.pixels[k]) = std::max(gamma(w.pixels[k]), w.weights[k]);
  for (Index j = 0; j < gamma.size(); ++j)
    require(gamma(j) > 0.0, ErrorCode::kInvalidArgument,
            "gamma_of: SR pixel " + std::to_string(j) + " is not covered by any window");
  return gamma;
}

std::optional<double> varah_lower_bound(const Matrix& b) {
  require(b.rows() == b.cols(), ErrorCode::kDimensionMismatch, "varah_lower_bound: matrix is not square");
  const Index n = b.rows();
  if (n == 0) return std::nullopt;
  double bound = kInf;
  for (Index i = 0; i < n; ++i) {
    const double diag = std::abs(b(i, i));
    const double col = b.col(i).cwiseAbs().sum() - diag;
    const double row = b.row(i).cwiseAbs().sum() - diag;
    const double c_i = diag - col;
    const double d_i = diag - row;
    if (!(c_i > 0.0) || !(d_i > 0.0)) return std::nullopt;
    bound = std::min({bound, c_i, d_i});
  }
  return bound;
}

double recovery_bound(double epsilon, double sigma_max_a, double kappa, double gamma_j, double c) {
  // ε = 0 means the dominance condition is exact; the bound is 0 regardless of κ.
  if (epsilon == 0.0) return 0.0;
  return epsilon * sigma_max_a * std::sqrt(1.0 + kappa * kappa) * (4.0 + 2.0 / gamma_j) * c;
}

AssumptionReport check_assumptions(const Matrix& endmembers, const Matrix& abundances,
                                   const Matrix& spectral, const SpatialResponse& spatial,
                                   const BoundsTolerances& tol) {
  AssumptionReport rep;
  const Index n = endmembers.cols();
  const Matrix decimated = decimate_abundances(abundances, spatial);
  const Matrix a_prime = spectral_decimate(spectral, endmembers);

  rep.endmember_rank_ratio = rank_ratio(endmembers, n);
  rep.abundance_rank_ratio = rank_ratio(decimated, n);
  rep.full_rank = rep.endmember_rank_ratio > tol.rank && rep.abundance_rank_ratio > tol.rank;

  rep.kruskal_rank = kruskal_rank(a_prime, tol.rank);
  for (Index c = 0; c < decimated.cols(); ++c) {
    const int count = static_cast<int>((decimated.col(c).array() > tol.support).count());
    if (count > rep.max_support) {
      rep.max_support = count;
      rep.worst_column = c;
    }
  }
  rep.sparse = rep.max_support <= rep.kruskal_rank;

  rep.pure_deviation = 0.0;
  for (Index t = 0; t < n; ++t) {
    auto [col, dev] = nearest_unit_column(decimated, t);
    rep.pure_columns.push_back(col);
    rep.pure_deviation = std::max(rep.pure_deviation, dev);
  }
  rep.pure_pixels = decimated.cols() > 0 && rep.pure_deviation <= tol.pure;

  const double inv_n = 1.0 / static_cast<double>(n);
  for (Index i = 0; i < n; ++i)
    if (!(endmembers.col(i).minCoeff() < inv_n)) rep.ineligible_columns.push_back(i);
  rep.epsilon_threshold = 1.0 / (4.0 * static_cast<double>(n));
  rep.epsilon = n >= 2 ? epsilon_of(endmembers) : 0.0;
  rep.dominance = rep.ineligible_columns.empty() && rep.epsilon < rep.epsilon_threshold;
  return rep;
}

bool Certificate::guarantee_applies() const {
  return assumptions.all() && gamma.size() > 0 && per_pixel_bound.allFinite() &&
         sigma_max_endmembers > 0.0 && c > 0.0;
}

double Certificate::max_bound() const {
  return per_pixel_bound.size() == 0 ? 0.0 : per_pixel_bound.maxCoeff();
}

Certificate certify(const Matrix& endmembers, const Matrix& abundances, const Matrix& spectral,
                    const SpatialResponse& spatial, const BoundsTolerances& tol) {
  const Index n = endmembers.cols();
  require(n >= 2, ErrorCode::kInvalidArgument, "certify: needs N >= 2");
  Certificate cert;
  const Matrix a_prime = spectral_decimate(spectral, endmembers);
  cert.assumptions = check_assumptions(endmembers, abundances, spectral, spatial, tol);
  cert.kruskal_rank = cert.assumptions.kruskal_rank;
  cert.epsilon = cert.assumptions.epsilon;
  cert.kappa = kappa_of(a_prime, tol.rank);
  cert.c = cert.kruskal_rank >= 1 ? c_of(static_cast<int>(n), cert.kruskal_rank) : kInf;
  cert.sigma_max_endmembers = sigma_max(endmembers);
  cert.gamma = gamma_of(spatial);
  cert.per_pixel_bound.resize(cert.gamma.size());
  for (Index j = 0; j < cert.gamma.size(); ++j)
    cert.per_pixel_bound(j) =
        recovery_bound(cert.epsilon, cert.sigma_max_endmembers, cert.kappa, cert.gamma(j), cert.c);
  return cert;
}

double dominance_probability_raw(int n, int m) {
  require(n >= 1 && m >= 1, ErrorCode::kInvalidArgument, "dominance probability: needs N >= 1 and M >= 1");
  const double nn = static_cast<double>(n);
  return 1.0 - nn * (nn - 1.0) * std::exp(-static_cast<double>(m) / (8.0 * nn * nn));
}

double dominance_probability(int n, int m) {
  return std::clamp(dominance_probability_raw(n, m), 0.0, 1.0);
}

bool dominance_holds(const Matrix& endmembers) {
  const Index n = endmembers.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Index i = 0; i < n; ++i)
    if (!(endmembers.col(i).minCoeff() < inv_n)) return false;
  return n < 2 || epsilon_of(endmembers) < 1.0 / (4.0 * static_cast<double>(n));
}

MonteCarloRate dominance_monte_carlo(int n, int m, std::int64_t trials, std::uint64_t seed) {
  require(trials >= 1, ErrorCode::kInvalidArgument, "dominance probability: needs at least one trial");
  MonteCarloRate out;
  out.trials = trials;
  out.analytic_raw = dominance_probability_raw(n, m);
  out.analytic = dominance_probability(n, m);
  Matrix a(m, n);
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Index c = 0; c < a.cols(); ++c)
      for (Index r = 0; r < a.rows(); ++r) a(r, c) = unit(rng);
    if (dominance_holds(a)) ++out.successes;
  }
  out.rate = static_cast<double>(out.successes) / static_cast<double>(trials);
  out.sigma = std::sqrt(out.analytic * (1.0 - out.analytic) / static_cast<double>(trials));
  return out;
}

}  // namespace cosmf
