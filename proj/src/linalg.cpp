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

#include "cosmf/linalg.hpp"

#include <algorithm>

namespace cosmf {

Vector singular_values(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return Vector();
  if (std::min(m.rows(), m.cols()) <= 16) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues();
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

double sigma_max(const Matrix& m) {
  Vector s = singular_values(m);
  return s.size() == 0 ? 0.0 : s(0);
}

double sigma_min(const Matrix& m) {
  Vector s = singular_values(m);
  return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

Matrix select_columns(const Matrix& m, std::span<const Index> columns) {
  Matrix out(m.rows(), static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c)
    out.col(static_cast<Index>(c)) = m.col(columns[c]);
  return out;
}

Matrix principal_submatrix(const Matrix& m, std::span<const Index> indices) {
  const auto n = static_cast<Index>(indices.size());
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      out(i, j) = m(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
  return out;
}

std::vector<Index> complement(Index n, std::span<const Index> sorted) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(n) - sorted.size());
  std::size_t k = 0;
  for (Index i = 0; i < n; ++i) {
    if (k < sorted.size() && sorted[k] == i) {
      ++k;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

}  // namespace cosmf
