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

#include "cosmf/counterexample.hpp"
#include "cosmf/error.hpp"
#include "cosmf/model.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace cosmf;

namespace {

bool has_violation(const ValidationReport& r, const std::string& invariant, const std::string& location = "") {
  for (const auto& v : r.violations)
    if (v.invariant == invariant && (location.empty() || v.location.find(location) != std::string::npos)) return true;
  return false;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("reconstruct of identities is the identity") {
  CHECK(reconstruct(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) == Matrix::Identity(2, 2));
}

TEST_CASE("reconstruct matches a triple-loop product") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const Matrix a = oracle::random_uniform(4, 3, rng);
    const Matrix s = oracle::random_simplex_columns(3, 5, rng);
    const Matrix x = reconstruct(a, s);
    CHECK(oracle::rel_diff(x, oracle::matmul(a, s)) < 1e-14);
    CHECK(x.minCoeff() >= 0.0);
    CHECK(x.maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("reconstruct rejects mismatched shapes") {
  CHECK(code_of([] { reconstruct(Matrix::Ones(3, 2), Matrix::Ones(3, 4)); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("three-material instance: each pixel equals an endmember mix") {
  const auto inst = build_counterexample(0.1);
  const Matrix x = reconstruct(inst.endmembers, inst.abundances);
  for (Index j = 0; j < 6; ++j) {
    Index t = 0;
    inst.abundances.col(j).maxCoeff(&t);
    CHECK((x.col(j) - inst.endmembers.col(t)).norm() < 1e-15);
  }
}

TEST_CASE("spectral decimation") {
  Matrix ones(1, 3);
  ones << 1, 1, 1;
  Vector x(3);
  x << 0.2, 0.3, 0.5;
  CHECK(spectral_decimate(ones, x)(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  std::mt19937_64 rng(3);
  const Matrix y = oracle::random_uniform(4, 6, rng);
  CHECK(spectral_decimate(Matrix::Identity(4, 4), y) == y);
  const auto inst = build_counterexample(0.1);
  const Matrix ap = spectral_decimate(inst.spectral, inst.endmembers);
  CHECK((ap - Matrix::Ones(1, 3)).norm() < 1e-15);
  CHECK(code_of([] { spectral_decimate(Matrix::Ones(2, 3), Matrix::Ones(4, 1)); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("spatial decimation") {
  std::mt19937_64 rng(11);
  const Matrix x = oracle::random_uniform(5, 7, rng);
  CHECK(spatial_decimate(x, SpatialResponse::identity(7)) == x);

  const auto inst = build_counterexample(0.1);
  CHECK((spatial_decimate(inst.abundances, inst.spatial) - Matrix::Identity(3, 3)).norm() < 1e-15);

  for (int t = 0; t < 10; ++t) {
    const SpatialResponse g = oracle::random_overlapping_spatial(6, rng);
    const Matrix y = oracle::random_uniform(4, g.sr_pixels(), rng);
    CHECK(oracle::rel_diff(spatial_decimate(y, g), oracle::window_sum(y, g)) < 1e-14);
    CHECK(oracle::rel_diff(spatial_decimate(y, g), oracle::matmul(y, g.dense())) < 1e-14);
  }
  CHECK(code_of([] { spatial_decimate(Matrix::Ones(2, 3), SpatialResponse::identity(4)); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("spatial adjoint is multiplication by the transpose") {
  std::mt19937_64 rng(5);
  const SpatialResponse g = oracle::random_overlapping_spatial(5, rng);
  const Matrix r = oracle::random_uniform(3, g.hs_pixels(), rng);
  CHECK(oracle::rel_diff(spatial_adjoint(r, g), oracle::matmul(r, g.dense().transpose())) < 1e-14);
}

TEST_CASE("decimated abundances stay on the simplex and nest supports") {
  Matrix e1 = Matrix::Zero(3, 7);
  e1.row(0).setOnes();
  std::mt19937_64 rng(9);
  const SpatialResponse g = oracle::random_overlapping_spatial(3, rng);
  const Matrix d = decimate_abundances(e1, g);
  for (Index i = 0; i < d.cols(); ++i) CHECK((d.col(i) - Vector::Unit(3, 0)).norm() < 1e-15);

  const auto inst = build_counterexample(0.3);
  CHECK((decimate_abundances(inst.abundances, inst.spatial) - Matrix::Identity(3, 3)).norm() < 1e-15);

  for (int t = 0; t < 20; ++t) {
    const SpatialResponse gt = oracle::random_overlapping_spatial(8, rng);
    Matrix s = oracle::random_simplex_columns(4, gt.sr_pixels(), rng);
    // Sparsify so that support nesting is non-trivial.
    for (Index j = 0; j < s.cols(); ++j) {
      s(static_cast<Index>(rng() % 4), j) = 0.0;
      s.col(j) /= s.col(j).sum();
    }
    const Matrix sp = decimate_abundances(s, gt);
    for (Index i = 0; i < sp.cols(); ++i) {
      CHECK(std::abs(sp.col(i).sum() - 1.0) < 1e-12);
      CHECK(in_simplex(sp.col(i)));
      for (Index p : gt.window(i).pixels)
        for (Index k = 0; k < 4; ++k)
          if (s(k, p) > 0.0) CHECK(sp(k, i) > 0.0);
    }
  }
}

TEST_CASE("factor regrouping identities") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    const SpatialResponse g = oracle::random_overlapping_spatial(6, rng);
    const Matrix a = oracle::random_uniform(8, 3, rng);
    const Matrix s = oracle::random_simplex_columns(3, g.sr_pixels(), rng);
    const Matrix f = oracle::random_uniform(2, 8, rng);
    CHECK(oracle::rel_diff(spectral_decimate(f, reconstruct(a, s)), reconstruct(spectral_decimate(f, a), s)) <
          1e-12);
    CHECK(oracle::rel_diff(spatial_decimate(reconstruct(a, s), g), reconstruct(a, decimate_abundances(s, g))) <
          1e-12);
  }
}

TEST_CASE("make_scene and observe") {
  const auto inst = build_counterexample(0.2);
  const Scene sc = make_scene(inst.endmembers, inst.abundances);
  CHECK(sc.image == reconstruct(inst.endmembers, inst.abundances));
  const ObservedPair y = observe(sc.image, inst.spectral, inst.spatial);
  CHECK(y.ms.rows() == 1);
  CHECK(y.ms.cols() == 6);
  CHECK(y.hs.rows() == 3);
  CHECK(y.hs.cols() == 3);
  CHECK((y.hs - inst.endmembers).norm() < 1e-15);
}

TEST_CASE("validation of a valid instance is empty") {
  const auto inst = build_counterexample(0.1);
  CHECK(validate_model(inst.endmembers, inst.abundances, inst.spectral, inst.spatial).ok());
}

TEST_CASE("validation reports a zero window weight") {
  const auto inst = build_counterexample(0.1);
  std::vector<Window> w = inst.spatial.windows();
  w[1].weights = {1.0, 0.0};
  const SpatialResponse g(6, w);
  const auto r = validate_model(inst.endmembers, inst.abundances, inst.spectral, g);
  CHECK(has_violation(r, "spatial: g_i > 0", "window 1 pixel 3"));
}

TEST_CASE("validation names an uncovered SR pixel") {
  const auto inst = build_counterexample(0.1);
  std::vector<Window> w = inst.spatial.windows();
  w[2] = Window{{4}, {1.0}};
  const SpatialResponse g(6, w);
  const auto r = validate_model(inst.endmembers, inst.abundances, inst.spectral, g);
  CHECK(has_violation(r, "spatial: windows cover every SR pixel", "SR pixel 5"));
  CHECK_FALSE(has_violation(r, "spatial: windows cover every SR pixel", "SR pixel 4"));
}

TEST_CASE("validation of endmembers, abundances and responses") {
  const auto inst = build_counterexample(0.1);
  Matrix a = inst.endmembers;
  a(0, 0) = 1.5;
  Matrix s = inst.abundances;
  s(0, 3) = 0.5;
  Matrix f(1, 3);
  f << 0.0, 0.0, 0.0;
  const auto r = validate_model(a, s, f, inst.spatial);
  CHECK(has_violation(r, "endmembers: entry <= 1", "(0,0)"));
  CHECK(has_violation(r, "abundances: column sum = 1", "column 3"));
  CHECK(has_violation(r, "spectral: row has a positive weight", "row 0"));
  CHECK(code_of([] { SpatialResponse(3, {Window{{0, 3}, {0.5, 0.5}}}); }) == ErrorCode::kInvalidArgument);
}

}  // TEST_SUITE
