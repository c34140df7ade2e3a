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

#ifndef COSMF_LINALG_HPP
#define COSMF_LINALG_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace cosmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Singular values in descending order. Empty input gives an empty vector.
Vector singular_values(const Matrix& m);

/// Largest singular value; 0 for a matrix with no rows or no columns.
double sigma_max(const Matrix& m);

/// The min(rows, cols)-th singular value, so fat blocks are measured by
/// their row rank. 0 for an empty matrix.
double sigma_min(const Matrix& m);

Matrix select_columns(const Matrix& m, std::span<const Index> columns);
Matrix principal_submatrix(const Matrix& m, std::span<const Index> indices);

/// Column indices of `m` that are not in `columns` (which must be sorted).
std::vector<Index> complement(Index n, std::span<const Index> sorted);

/// Calls `visit(subset)` for every size-k subset of {0..n-1} in lexicographic
/// order. Stops early and returns false if `visit` returns false.
template <class Visitor>
bool for_each_subset(Index n, Index k, Visitor&& visit) {
  if (k < 0 || k > n) return true;
  std::vector<Index> subset(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (!visit(std::span<const Index>(subset))) return false;
    Index pos = k - 1;
    while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) return true;
    ++subset[static_cast<std::size_t>(pos)];
    for (Index j = pos + 1; j < k; ++j)
      subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace cosmf

#endif  // COSMF_LINALG_HPP
