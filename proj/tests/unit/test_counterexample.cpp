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
#include "cosmf/counterexample.hpp"
#include "cosmf/error.hpp"
#include "cosmf/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace cosmf;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_SUITE("counterexample") {

TEST_CASE("instance matrices") {
  CHECK(build_counterexample(0.0).endmembers == Matrix::Identity(3, 3));
  const auto inst = build_counterexample(0.25);
  CHECK(inst.endmembers(0, 0) == 0.75);
  CHECK(inst.endmembers(1, 0) == 0.25);
  CHECK(inst.endmembers(2, 0) == 0.0);
  CHECK(inst.spectral == Matrix::Ones(1, 3));
  REQUIRE(inst.spatial.hs_pixels() == 3);
  for (Index i = 0; i < 3; ++i) {
    CHECK(inst.spatial.window(i).pixels == std::vector<Index>{2 * i, 2 * i + 1});
    CHECK(inst.spatial.window(i).weights == std::vector<double>{0.5, 0.5});
  }
  CHECK(code_of([] { build_counterexample(0.5); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { build_counterexample(-0.01); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("family members are feasible with zero objective") {
  for (int r = 0; r <= 9; ++r) {
    const double rho = 0.05 * r;
    const auto inst = build_counterexample(rho);
    const Problem p{inst.observed.ms, inst.observed.hs, inst.spectral, inst.spatial};
    for (int i = 0; i <= 20; ++i) {
      const double a1 = -rho + 2.0 * rho * i / 20.0;
      const FamilyMember m = feasible_family(inst, a1, -a1 / 2.0);
      CHECK(m.endmembers == Matrix::Identity(3, 3));
      for (Index j = 0; j < 6; ++j) CHECK(in_simplex(m.abundances.col(j)));
      CHECK(objective(m.endmembers, m.abundances, p) <= 1e-24);
      const double err = (inst.endmembers * inst.abundances.col(0) - m.abundances.col(0)).norm();
      CHECK(std::abs(err - std::sqrt(2.0) * std::abs(a1)) <= 1e-12);
    }
  }
}

TEST_CASE("family at zero parameters") {
  const double rho = 0.3;
  const auto inst = build_counterexample(rho);
  const FamilyMember m = feasible_family(inst, 0.0, 0.0);
  Vector c0(3), c2(3);
  c0 << 1 - rho, rho, 0;
  c2 << rho, 1 - rho, 0;
  CHECK((m.abundances.col(0) - c0).norm() < 1e-15);
  CHECK((m.abundances.col(1) - c0).norm() < 1e-15);
  CHECK((m.abundances.col(2) - c2).norm() < 1e-15);
}

TEST_CASE("the family edge reaches a vertex") {
  const auto inst = build_counterexample(0.25);
  const FamilyMember m = feasible_family(inst, 0.25, 0.0);
  CHECK((m.abundances.col(0) - Vector::Unit(3, 0)).norm() < 1e-15);
  const Problem p{inst.observed.ms, inst.observed.hs, inst.spectral, inst.spatial};
  CHECK(objective(m.endmembers, m.abundances, p) < 1e-24);
  CHECK(code_of([&] { feasible_family(inst, 0.26, 0.0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { feasible_family(inst, 0.0, -0.26); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("first-column error depends only on the first parameter") {
  const auto inst = build_counterexample(0.2);
  const Vector truth = inst.endmembers * inst.abundances.col(0);
  const double e1 = (truth - feasible_family(inst, 0.1, -0.2).abundances.col(0)).norm();
  const double e2 = (truth - feasible_family(inst, 0.1, 0.2).abundances.col(0)).norm();
  CHECK(e1 == doctest::Approx(e2).epsilon(1e-15));
}

TEST_CASE("report at the family edge") {
  const auto rep = verify_counterexample(build_counterexample(0.25), 0.25);
  CHECK(rep.error == doctest::Approx(0.353553).epsilon(1e-6));
  CHECK(rep.identity_holds);
  CHECK(rep.feasible);
  CHECK(rep.sup_holds);
  CHECK(rep.grid_alpha.size() == 21);
  CHECK(rep.grid_alpha.front() == -0.25);
  CHECK(rep.grid_alpha.back() == 0.25);
  CHECK(rep.grid_sup == doctest::Approx(std::sqrt(2.0) * 0.25).epsilon(1e-14));
}

TEST_CASE("report against the certificate") {
  const auto rep = verify_counterexample(build_counterexample(0.1), 0.05);
  CHECK(rep.error == doctest::Approx(0.070711).epsilon(1e-5));
  CHECK(rep.certificate_bound == doctest::Approx(2.7994).epsilon(1e-4));
  CHECK(rep.within_bound);
  const auto zero = verify_counterexample(build_counterexample(0.0), 0.0);
  CHECK(zero.error == 0.0);
  CHECK(zero.grid_sup == 0.0);
  CHECK(zero.within_bound);
}

}  // TEST_SUITE
