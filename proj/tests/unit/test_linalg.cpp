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

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace cosmf;

TEST_SUITE("linalg") {

TEST_CASE("singular values are sorted in descending order") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, 2.0;
  const Vector s = singular_values(d);
  REQUIRE(s.size() == 3);
  CHECK(s(0) == doctest::Approx(3.0));
  CHECK(s(1) == doctest::Approx(2.0));
  CHECK(s(2) == doctest::Approx(1.0));
}

TEST_CASE("sigma_min of a fat block uses its row count") {
  Matrix row(1, 3);
  row << 1.0, 1.0, 1.0;
  CHECK(sigma_min(row) == doctest::Approx(std::sqrt(3.0)));
  CHECK(sigma_max(row) == doctest::Approx(std::sqrt(3.0)));
  Matrix tall(3, 1);
  tall << 3.0, 0.0, 4.0;
  CHECK(sigma_min(tall) == doctest::Approx(5.0));
}

TEST_CASE("empty blocks have zero singular values") {
  CHECK(sigma_max(Matrix(2, 0)) == 0.0);
  CHECK(sigma_min(Matrix(0, 3)) == 0.0);
  CHECK(singular_values(Matrix(4, 0)).size() == 0);
}

TEST_CASE("large inputs agree with the small-matrix path") {
  Matrix m = Matrix::Random(40, 30);
  const Vector s = singular_values(m);
  Eigen::JacobiSVD<Matrix> svd(m);
  CHECK((s - svd.singularValues()).norm() < 1e-10);
}

TEST_CASE("column selection and principal blocks") {
  Matrix m(3, 3);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const std::vector<Index> idx{0, 2};
  const Matrix c = select_columns(m, idx);
  CHECK(c.cols() == 2);
  CHECK(c(1, 1) == 6.0);
  const Matrix p = principal_submatrix(m, idx);
  CHECK(p(0, 0) == 1.0);
  CHECK(p(0, 1) == 3.0);
  CHECK(p(1, 0) == 7.0);
  CHECK(p(1, 1) == 9.0);
  const auto rest = complement(4, idx);
  CHECK(rest == std::vector<Index>{1, 3});
}

TEST_CASE("subset enumeration is lexicographic and complete") {
  std::vector<std::vector<Index>> seen;
  for_each_subset(4, 2, [&](std::span<const Index> s) {
    seen.emplace_back(s.begin(), s.end());
    return true;
  });
  REQUIRE(seen.size() == 6);
  CHECK(seen.front() == std::vector<Index>{0, 1});
  CHECK(seen[2] == std::vector<Index>{0, 3});
  CHECK(seen.back() == std::vector<Index>{2, 3});

  for (Index n = 0; n <= 8; ++n)
    for (Index k = 0; k <= n; ++k) {
      long count = 0;
      for_each_subset(n, k, [&](std::span<const Index>) {
        ++count;
        return true;
      });
      long binom = 1;
      for (Index i = 1; i <= k; ++i) binom = binom * (n - k + i) / i;
      CHECK(count == binom);
    }
}

TEST_CASE("subset enumeration stops when the visitor declines") {
  int visits = 0;
  const bool finished = for_each_subset(5, 2, [&](std::span<const Index>) { return ++visits < 3; });
  CHECK_FALSE(finished);
  CHECK(visits == 3);
}

}  // TEST_SUITE
