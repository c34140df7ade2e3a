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

// Recovery certificate for the coupled factorization: the quantities that
// enter the per-pixel error bound, the checks of the scene assumptions they
// rely on, and the intermediate inequalities of the bound's derivation
// evaluated on concrete solutions.
//
// Notation used in the comments: Ā true endmembers (M x N), S̄ true
// abundances, A' = F Ā, S̄' = S̄ G. An estimate (A, S) relates to the truth
// through A = Ā R^-1 and S G = R S̄'.

#ifndef COSMF_BOUNDS_HPP
#define COSMF_BOUNDS_HPP

#include "cosmf/linalg.hpp"
#include "cosmf/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cosmf {

/// Largest column count enumerated by kruskal_rank / kappa_of (2^20 subsets).
inline constexpr Index kEnumerationGuard = 20;

struct BoundsTolerances {
  double rank = 1e-9;     // relative singular-value threshold
  double support = 1e-9;  // abundances at or below this count as zero
  double pure = 1e-6;     // max deviation of a pure column from e_t
};

/// Largest K such that every K-column subset has sigma_min > tol * sigma_max(A').
int kruskal_rank(const Matrix& a_prime, double tol = 1e-9);

/// Spectral dominance ε of the endmembers. +infinity when some column has no
/// entry below 1/N (the definition does not apply).
double epsilon_of(const Matrix& endmembers);

/// Ratio max_J sigma_max(A'_{J^c}) / sigma_min(A'_J) over nonempty J.
/// sigma_min of a k-column block is its min(rows, k)-th singular value and
/// sigma_max of an empty block is 0. +infinity if a denominator vanishes.
double kappa_of(const Matrix& a_prime, double tol = 1e-9);

/// N/2 when K >= N/2, otherwise sqrt(K (N - K)).
double c_of(int n, int k);

/// gamma_j = largest window weight covering SR pixel j.
Vector gamma_of(const SpatialResponse& spatial);

/// min_i min(c_i, d_i) with c_i / d_i the column / row diagonal-dominance
/// margins. Lower-bounds sigma_min(B) when every margin is positive; nullopt
/// otherwise.
std::optional<double> varah_lower_bound(const Matrix& b);

double recovery_bound(double epsilon, double sigma_max_a, double kappa, double gamma_j, double c);

struct AssumptionReport {
  // Full column rank of Ā and full row rank of S̄'.
  bool full_rank = false;
  double endmember_rank_ratio = 0.0;  // sigma_N / sigma_1 of Ā
  double abundance_rank_ratio = 0.0;  // sigma_N / sigma_1 of S̄'
  // Every column of S̄' is K-sparse.
  bool sparse = false;
  int kruskal_rank = 0;
  int max_support = 0;
  Index worst_column = -1;
  // Some columns of S̄' form the identity.
  bool pure_pixels = false;
  std::vector<Index> pure_columns;  // nearest column to e_t, per t
  double pure_deviation = 0.0;
  // Every column is eligible and ε < 1/(4N).
  bool dominance = false;
  double epsilon = 0.0;
  double epsilon_threshold = 0.0;
  std::vector<Index> ineligible_columns;

  bool all() const { return full_rank && sparse && pure_pixels && dominance; }
};

AssumptionReport check_assumptions(const Matrix& endmembers, const Matrix& abundances,
                                   const Matrix& spectral, const SpatialResponse& spatial,
                                   const BoundsTolerances& tol = {});

struct Certificate {
  int kruskal_rank = 0;
  double epsilon = 0.0;
  double kappa = 0.0;
  double c = 0.0;
  double sigma_max_endmembers = 0.0;
  Vector gamma;
  Vector per_pixel_bound;
  AssumptionReport assumptions;

  /// True when every modelling assumption holds and N >= 2, so the bound is guaranteed.
  bool guarantee_applies() const;
  double max_bound() const;
};

Certificate certify(const Matrix& endmembers, const Matrix& abundances, const Matrix& spectral,
                    const SpatialResponse& spatial, const BoundsTolerances& tol = {});

// -- Dominance probability under i.i.d. uniform endmembers ----------------

/// 1 - N(N-1) exp(-M / (8 N^2)), unclamped.
double dominance_probability_raw(int n, int m);
/// dominance_probability_raw clamped to [0, 1].
double dominance_probability(int n, int m);

/// Eligibility of every column plus ε < 1/(4N).
bool dominance_holds(const Matrix& endmembers);

struct MonteCarloRate {
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double rate = 0.0;
  double analytic = 0.0;      // clamped
  double analytic_raw = 0.0;  // unclamped
  double sigma = 0.0;         // binomial standard error at the analytic rate
};

MonteCarloRate dominance_monte_carlo(int n, int m, std::int64_t trials, std::uint64_t seed);

// -- Alignment of an estimate with the truth --------------------------------

struct AlignmentReport {
  Matrix r;              // S G = R S̄'
  Matrix r_inverse;      // pinv(Ā) A
  std::vector<Index> row_order;  // R̃ row i is R row row_order[i]
  Matrix r_tilde;
  std::string method;    // "partial-pivoting" or "hungarian"
  bool pivot_rule_holds = false;
  double rho = 0.0;      // max off-diagonal |r̃_ij|
  double beta = 0.0;     // min sigma_min of principal blocks, N-K <= |I| <= N-1
  double sigma_min_r_tilde = 0.0;
  double epsilon = 0.0;
  bool r_in_simplex = false;
  double simplex_violation = 0.0;  // worst distance of R's columns from the simplex
  bool off_diagonal_within_epsilon = false;
  double off_diagonal_margin = 0.0;     // ε - rho
  double pure_cross_check = 0.0; // max |S'_K - R| on the pure columns of S̄'
};

/// R from A = Ā R^-1, then a row permutation making R̃ = Π R near-diagonal.
/// Partial pivoting is tried first; Hungarian max-diagonal assignment is the
/// fallback when pivoting leaves an off-diagonal above ε.
AlignmentReport extract_alignment(const Matrix& true_endmembers, const Matrix& endmembers,
                                  const Matrix& true_decimated_abundances,
                                  const Matrix& decimated_abundances, int kruskal_rank,
                                  double epsilon, double simplex_tol = 1e-6,
                                  const BoundsTolerances& tol = {});

/// Row order maximising the diagonal sum of the permuted matrix (square input).
std::vector<Index> max_diagonal_assignment(const Matrix& weights);

struct AbundanceErrorReport {
  bool applicable = false;
  std::string reason;
  Vector lhs;             // ||s̄_j - R^-1 s_j||
  Vector rhs;             // sqrt(1+κ²) (ρC/β) (1/σmin(R̃) + 1/γ_j)
  Vector recon_error;     // ||Ā s̄_j - A s_j||
  bool inequality_holds = false;
  bool chain_holds = false;   // recon_error <= σmax(Ā) lhs
  double min_slack = 0.0;     // min_j rhs - lhs
  Index worst_pixel = -1;
};

AbundanceErrorReport verify_abundance_error(const Matrix& true_endmembers,
                                       const Matrix& true_abundances, const Matrix& endmembers,
                                       const Matrix& abundances, const AlignmentReport& alignment,
                                       const Certificate& certificate, double slack = 1e-9);

}  // namespace cosmf

#endif  // COSMF_BOUNDS_HPP
