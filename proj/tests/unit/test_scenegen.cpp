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
#include "cosmf/scenegen.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

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

bool covers_all(const SpatialResponse& g) {
  std::vector<bool> seen(static_cast<std::size_t>(g.sr_pixels()), false);
  for (const auto& w : g.windows())
    for (Index p : w.pixels) seen[static_cast<std::size_t>(p)] = true;
  for (bool b : seen)
    if (!b) return false;
  return true;
}

}  // namespace

TEST_SUITE("scenegen") {

TEST_CASE("uniform 2x2 kernel on a 2x2 image is one flat window") {
  const SpatialResponse g = build_spatial_response(2, 2, KernelKind::kUniform, 2, 1.0, 2);
  REQUIRE(g.hs_pixels() == 1);
  std::set<Index> pixels(g.window(0).pixels.begin(), g.window(0).pixels.end());
  CHECK(pixels == std::set<Index>{0, 1, 2, 3});
  for (double w : g.window(0).weights) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("gaussian 3x3 windows match direct kernel evaluation") {
  const Index w = 4;
  const SpatialResponse g = build_spatial_response(w, 4, KernelKind::kGaussian, 3, 1.0, 2);
  REQUIRE(g.hs_pixels() == 4);
  CHECK(covers_all(g));
  for (Index i = 0; i < 4; ++i) {
    const auto& win = g.window(i);
    double sum = 0.0;
    for (double v : win.weights) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);
    // Footprint centre of cell (cx, cy) is SR pixel (2cx, 2cy).
    const Index cx = i % 2;
    const Index cy = i / 2;
    double z = 0.0;
    for (Index y = 2 * cy - 1; y <= 2 * cy + 1; ++y)
      for (Index x = 2 * cx - 1; x <= 2 * cx + 1; ++x)
        if (x >= 0 && y >= 0 && x < w && y < 4)
          z += std::exp(-static_cast<double>((x - 2 * cx) * (x - 2 * cx) + (y - 2 * cy) * (y - 2 * cy)) / 2.0);
    for (std::size_t k = 0; k < win.pixels.size(); ++k) {
      const Index x = win.pixels[k] % w;
      const Index y = win.pixels[k] / w;
      const double expected =
          std::exp(-static_cast<double>((x - 2 * cx) * (x - 2 * cx) + (y - 2 * cy) * (y - 2 * cy)) / 2.0) / z;
      CHECK(win.weights[k] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("large gaussian response has one window per cell and covers the image") {
  const SpatialResponse g = build_spatial_response(120, 120, KernelKind::kGaussian, 11, 1.7 * 1.7, 4);
  CHECK(g.hs_pixels() == 900);
  CHECK(g.sr_pixels() == 14400);
  CHECK(covers_all(g));
  for (const auto& win : g.windows()) {
    double sum = 0.0;
    for (double v : win.weights) {
      CHECK(v > 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("a kernel smaller than the factor is rejected") {
  CHECK(code_of([] { build_spatial_response(4, 4, KernelKind::kUniform, 1, 1.0, 2); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { build_spatial_response(5, 4, KernelKind::kUniform, 2, 1.0, 2); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("spectral response averages contiguous blocks") {
  const Matrix f = build_spectral_response(6, 2);
  Matrix expected(2, 6);
  expected << 1, 1, 1, 0, 0, 0, 0, 0, 0, 1, 1, 1;
  expected /= 3.0;
  CHECK((f - expected).norm() < 1e-15);

  const Matrix f1 = build_spectral_response(3, 1);
  CHECK((3.0 * f1 - Matrix::Ones(1, 3)).norm() < 1e-15);

  const Matrix big = build_spectral_response(178, 6);
  const std::vector<Index> sizes{30, 30, 30, 30, 29, 29};
  Index start = 0;
  for (Index r = 0; r < 6; ++r) {
    const Index n = sizes[static_cast<std::size_t>(r)];
    CHECK(std::abs(big.row(r).sum() - 1.0) < 1e-12);
    CHECK((big.row(r).segment(start, n).array() == 1.0 / static_cast<double>(n)).all());
    CHECK(big.row(r).head(start).norm() == 0.0);
    CHECK(big.row(r).tail(178 - start - n).norm() == 0.0);
    start += n;
  }
  CHECK(code_of([] { build_spectral_response(3, 3); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("desk scenes satisfy every modelling assumption") {
  SceneConfig c;
  const Matrix f = build_spectral_response(c.bands, c.ms_bands);
  const SpatialResponse g = build_spatial_response(c);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    c.seed = seed;
    const GeneratedScene s = generate_scene(c, f, g);
    const AssumptionReport r = check_assumptions(s.scene.endmembers, s.scene.abundances, f, g);
    CHECK(r.all());
    const Matrix sp = decimate_abundances(s.scene.abundances, g);
    REQUIRE(s.pure_windows.size() == static_cast<std::size_t>(c.endmembers));
    for (Index t = 0; t < c.endmembers; ++t)
      CHECK((sp.col(s.pure_windows[static_cast<std::size_t>(t)]) - Vector::Unit(c.endmembers, t)).norm() < 1e-12);
    int max_support = 0;
    for (Index i = 0; i < sp.cols(); ++i)
      max_support = std::max(max_support, static_cast<int>((sp.col(i).array() > 1e-9).count()));
    CHECK(max_support <= oracle::kruskal_rank_brute(f * s.scene.endmembers));
    CHECK((s.scene.image - s.scene.endmembers * s.scene.abundances).norm() < 1e-12);
    CHECK(s.scene.endmembers.minCoeff() >= 0.0);
    CHECK(s.scene.endmembers.maxCoeff() <= 1.0);
  }
}

TEST_CASE("scene generation is deterministic in the seed") {
  SceneConfig c;
  c.seed = 42;
  const GeneratedScene a = generate_scene(c);
  const GeneratedScene b = generate_scene(c);
  CHECK(a.scene.endmembers == b.scene.endmembers);
  CHECK(a.scene.abundances == b.scene.abundances);
  c.seed = 43;
  const GeneratedScene d = generate_scene(c);
  CHECK(a.scene.endmembers != d.scene.endmembers);
}

TEST_CASE("uniform endmember sampling with two materials") {
  SceneConfig c;
  c.bands = 64;
  c.ms_bands = 2;
  c.endmembers = 2;
  c.max_support = 1;
  c.kernel = KernelKind::kUniform;
  c.kernel_size = 2;
  c.sampling = EndmemberSampling::kUniform;
  c.width = 8;
  c.height = 8;
  int total_draws = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    c.seed = seed;
    const GeneratedScene s = generate_scene(c);
    total_draws += s.endmember_draws;
    const Matrix f = build_spectral_response(c.bands, c.ms_bands);
    CHECK(check_assumptions(s.scene.endmembers, s.scene.abundances, f, build_spatial_response(c)).all());
  }
  // Each draw succeeds with probability >= 1 - 2 exp(-2); 30 scenes need
  // about 41 draws on average, far below this ceiling.
  CHECK(total_draws < 100);
}

TEST_CASE("impossible configurations are reported") {
  SceneConfig c;
  c.sampling = EndmemberSampling::kUniform;
  c.max_draws = 20;
  try {
    generate_scene(c);
    FAIL("expected the draw budget to run out");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBudgetExhausted);
    CHECK(std::string(e.what()).find("predicted") != std::string::npos);
  }
  SceneConfig d;
  d.max_support = 7;
  CHECK(code_of([&] { generate_scene(d); }) != ErrorCode{});
  SceneConfig e;
  e.ms_bands = 50;
  CHECK(code_of([&] { e.validate(); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("noise is rescaled to the exact SNR") {
  std::mt19937_64 rng(1);
  const Matrix y = oracle::random_uniform(7, 9, rng);
  CHECK(add_noise(y, std::numeric_limits<double>::infinity(), 3) == y);
  for (double snr : {0.0, 15.0, 20.0, 35.0}) {
    const Matrix n = add_noise(y, snr, 11);
    const double realized = 10.0 * std::log10(y.squaredNorm() / (n - y).squaredNorm());
    CHECK(std::abs(realized - snr) < 1e-9);
  }
  CHECK(add_noise(y, 20.0, 5) == add_noise(y, 20.0, 5));
  CHECK(add_noise(y, 20.0, 5) != add_noise(y, 20.0, 6));
  CHECK(code_of([] { add_noise(Matrix::Zero(3, 3), 20.0, 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("mse is the per-element mean square") {
  std::mt19937_64 rng(2);
  const Matrix a = oracle::random_uniform(5, 6, rng);
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(a, (a.array() + 0.3).matrix()) == doctest::Approx(0.09).epsilon(1e-12));
  const Matrix b = oracle::random_uniform(5, 6, rng);
  double s = 0.0;
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 6; ++j) s += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
  CHECK(mse(a, b) == doctest::Approx(s / 30.0).epsilon(1e-14));
  CHECK(code_of([&] { mse(a, Matrix::Zero(5, 5)); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("enum names round-trip") {
  CHECK(parse_kernel_kind(to_string(KernelKind::kUniform)) == KernelKind::kUniform);
  CHECK(parse_kernel_kind(to_string(KernelKind::kGaussian)) == KernelKind::kGaussian);
  CHECK(parse_endmember_sampling(to_string(EndmemberSampling::kPlanted)) == EndmemberSampling::kPlanted);
  CHECK(code_of([] { parse_kernel_kind("box"); }) == ErrorCode::kInvalidArgument);
}

}  // TEST_SUITE
