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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cosmf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Slack on the off-diagonal test so an exact permutation passes when ε = 0.
constexpr double kOffDiagonalSlack = 1e-12;

Matrix permute_rows(const Matrix& m, const std::vector<Index>& order) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < order.size(); ++i) out.row(static_cast<Index>(i)) = m.row(order[i]);
  return out;
}

double max_off_diagonal(const Matrix& m) {
  double rho = 0.0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (i != j) rho = std::max(rho, std::abs(m(i, j)));
  return rho;
}

// Row order such that row i of the result satisfies r̃_ii = max_{j>=i} r̃_ij
// where possible; ties and failures fall back to the largest entry in column i.
std::vector<Index> partial_pivot_order(const Matrix& r, bool& rule_holds) {
  const Index n = r.rows();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::vector<Index> order;
  rule_holds = true;
  for (Index i = 0; i < n; ++i) {
    Index best = -1;
    Index fallback = -1;
    for (Index row = 0; row < n; ++row) {
      if (used[static_cast<std::size_t>(row)]) continue;
      if (fallback < 0 || r(row, i) > r(fallback, i)) fallback = row;
      const double tail = r.row(row).tail(n - i).maxCoeff();
      if (r(row, i) >= tail && (best < 0 || r(row, i) > r(best, i))) best = row;
    }
    if (best < 0) {
      rule_holds = false;
      best = fallback;
    }
    used[static_cast<std::size_t>(best)] = true;
    order.push_back(best);
  }
  return order;
}

}  // namespace

std::vector<Index> max_diagonal_assignment(const Matrix& weights) {
  require(weights.rows() == weights.cols(), ErrorCode::kDimensionMismatch,
          "max_diagonal_assignment: matrix is not square");
  // Hungarian method (shortest augmenting paths with potentials) minimising
  // -weights. Rows/columns are 1-based inside the loop; 0 is the sentinel.
  const Index n = weights.rows();
  const auto un = static_cast<std::size_t>(n);
  std::vector<double> u(un + 1, 0.0), v(un + 1, 0.0);
  std::vector<Index> match(un + 1, 0), way(un + 1, 0);
  for (Index row = 1; row <= n; ++row) {
    match[0] = row;
    Index col0 = 0;
    std::vector<double> minv(un + 1, kInf);
    std::vector<bool> used(un + 1, false);
    do {
      used[static_cast<std::size_t>(col0)] = true;
      const Index row0 = match[static_cast<std::size_t>(col0)];
      double delta = kInf;
      Index col1 = 0;
      for (Index col = 1; col <= n; ++col) {
        const auto c = static_cast<std::size_t>(col);
        if (used[c]) continue;
        const double cur = -weights(row0 - 1, col - 1) - u[static_cast<std::size_t>(row0)] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = col;
        }
      }
      for (Index col = 0; col <= n; ++col) {
        const auto c = static_cast<std::size_t>(col);
        if (used[c]) {
          u[static_cast<std::size_t>(match[c])] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[static_cast<std::size_t>(col0)] != 0);
    do {
      const Index col1 = way[static_cast<std::size_t>(col0)];
      match[static_cast<std::size_t>(col0)] = match[static_cast<std::size_t>(col1)];
      col0 = col1;
    } while (col0 != 0);
  }
  // match[col] is the row placed on the diagonal at position col.
  std::vector<Index> order(un);
  for (Index col = 1; col <= n; ++col)
    order[static_cast<std::size_t>(col - 1)] = match[static_cast<std::size_t>(col)] - 1;
  return order;
}

AlignmentReport extract_alignment(const Matrix& true_endmembers, const Matrix& endmembers,
                                  const Matrix& true_decimated_abundances,
                                  const Matrix& decimated_abundances, int kruskal_rank,
                                  double epsilon, double simplex_tol,
                                  const BoundsTolerances& tol) {
  require(true_endmembers.rows() == endmembers.rows() && true_endmembers.cols() == endmembers.cols(),
          ErrorCode::kDimensionMismatch, "extract_alignment: endmember shapes differ");
  require(true_decimated_abundances.rows() == decimated_abundances.rows() &&
              true_decimated_abundances.cols() == decimated_abundances.cols(),
          ErrorCode::kDimensionMismatch, "extract_alignment: decimated abundance shapes differ");
  const Index n = endmembers.cols();
  AlignmentReport rep;
  rep.epsilon = epsilon;

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(true_endmembers);
  require(cod.rank() == n, ErrorCode::kNumerical, "extract_alignment: true endmembers are rank deficient");
  rep.r_inverse = cod.pseudoInverse() * endmembers;
  const Vector s = singular_values(rep.r_inverse);
  require(s(n - 1) > tol.rank * s(0), ErrorCode::kNumerical, "extract_alignment: R is numerically singular");
  rep.r = rep.r_inverse.fullPivLu().inverse();

  rep.row_order = partial_pivot_order(rep.r, rep.pivot_rule_holds);
  rep.r_tilde = permute_rows(rep.r, rep.row_order);
  rep.rho = max_off_diagonal(rep.r_tilde);
  rep.method = "partial-pivoting";
  if (rep.rho > epsilon + kOffDiagonalSlack) {
    std::vector<Index> order = max_diagonal_assignment(rep.r);
    Matrix candidate = permute_rows(rep.r, order);
    const double rho = max_off_diagonal(candidate);
    if (rho < rep.rho) {
      rep.row_order = std::move(order);
      rep.r_tilde = std::move(candidate);
      rep.rho = rho;
      rep.method = "hungarian";
    }
  }
  rep.off_diagonal_margin = epsilon - rep.rho;
  rep.off_diagonal_within_epsilon = rep.rho <= epsilon + kOffDiagonalSlack;

  rep.beta = kInf;
  for (Index size = std::max<Index>(1, n - kruskal_rank); size <= n - 1; ++size)
    for_each_subset(n, size, [&](std::span<const Index> idx) {
      rep.beta = std::min(rep.beta, sigma_min(principal_submatrix(rep.r_tilde, idx)));
      return true;
    });
  rep.sigma_min_r_tilde = sigma_min(rep.r_tilde);

  rep.simplex_violation = 0.0;
  for (Index c = 0; c < n; ++c) {
    rep.simplex_violation = std::max({rep.simplex_violation, -rep.r.col(c).minCoeff(),
                                    rep.r.col(c).maxCoeff() - 1.0, std::abs(rep.r.col(c).sum() - 1.0)});
  }
  rep.r_in_simplex = rep.simplex_violation <= simplex_tol;

  // Second route to R: on the pure columns of S̄', S G equals R column by column.
  rep.pure_cross_check = 0.0;
  for (Index t = 0; t < n; ++t) {
    Index best = -1;
    double best_dev = kInf;
    for (Index c = 0; c < true_decimated_abundances.cols(); ++c) {
      Vector d = true_decimated_abundances.col(c);
      d(t) -= 1.0;
      const double dev = d.cwiseAbs().maxCoeff();
      if (dev < best_dev) {
        best_dev = dev;
        best = c;
      }
    }
    if (best < 0 || best_dev > tol.pure) {
      rep.pure_cross_check = std::numeric_limits<double>::quiet_NaN();
      break;
    }
    rep.pure_cross_check = std::max(
        rep.pure_cross_check, (decimated_abundances.col(best) - rep.r.col(t)).cwiseAbs().maxCoeff());
  }
  return rep;
}

AbundanceErrorReport verify_abundance_error(const Matrix& true_endmembers,
                                       const Matrix& true_abundances, const Matrix& endmembers,
                                       const Matrix& abundances, const AlignmentReport& alignment,
                                       const Certificate& certificate, double slack) {
  require(true_abundances.rows() == abundances.rows() && true_abundances.cols() == abundances.cols(),
          ErrorCode::kDimensionMismatch, "verify_abundance_error: abundance shapes differ");
  require(certificate.gamma.size() == abundances.cols(), ErrorCode::kDimensionMismatch,
          "verify_abundance_error: certificate pixel count differs");
  AbundanceErrorReport rep;
  const Index n = abundances.rows();
  const Index l = abundances.cols();
  if (n < 2) {
    rep.reason = "needs N >= 2";
    return rep;
  }
  if (!certificate.assumptions.sparse) {
    rep.reason = "abundance sparsity assumption fails";
    return rep;
  }
  if (!(alignment.beta > 0.0)) {
    rep.reason = "hypothesis violated: beta <= 0";
    return rep;
  }
  rep.applicable = true;
  rep.lhs.resize(l);
  rep.rhs.resize(l);
  rep.recon_error.resize(l);
  const double front = std::sqrt(1.0 + certificate.kappa * certificate.kappa) * alignment.rho *
                       certificate.c / alignment.beta;
  const Matrix recovered = alignment.r_inverse * abundances;
  rep.inequality_holds = true;
  rep.chain_holds = true;
  rep.min_slack = kInf;
  for (Index j = 0; j < l; ++j) {
    rep.lhs(j) = (true_abundances.col(j) - recovered.col(j)).norm();
    // ρ = 0 makes the right-hand side 0 even when κ is infinite.
    rep.rhs(j) = alignment.rho == 0.0
                     ? 0.0
                     : front * (1.0 / alignment.sigma_min_r_tilde + 1.0 / certificate.gamma(j));
    rep.recon_error(j) =
        (true_endmembers * true_abundances.col(j) - endmembers * abundances.col(j)).norm();
    const double gap = rep.rhs(j) - rep.lhs(j);
    if (gap < rep.min_slack) {
      rep.min_slack = gap;
      rep.worst_pixel = j;
    }
    if (!(rep.lhs(j) <= rep.rhs(j) + slack)) rep.inequality_holds = false;
    if (!(rep.recon_error(j) <= certificate.sigma_max_endmembers * rep.lhs(j) + slack))
      rep.chain_holds = false;
  }
  return rep;
}

}  // namespace cosmf
