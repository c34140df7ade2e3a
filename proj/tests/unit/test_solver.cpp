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
#include "cosmf/scenegen.hpp"
#include "cosmf/solver.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
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

bool trace_non_increasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] > trace[i - 1]) return false;
  return true;
}

bool feasible(const Solution& s) {
  if (s.endmembers.minCoeff() < 0.0 || s.endmembers.maxCoeff() > 1.0) return false;
  for (Index j = 0; j < s.abundances.cols(); ++j)
    if (!in_simplex(s.abundances.col(j))) return false;
  return true;
}

struct Desk {
  SceneConfig config;
  Matrix spectral;
  SpatialResponse spatial;
  GeneratedScene scene;
  ObservedPair y;
  explicit Desk(std::uint64_t seed) {
    config.seed = seed;
    spectral = build_spectral_response(config.bands, config.ms_bands);
    spatial = build_spatial_response(config);
    scene = generate_scene(config, spectral, spatial);
    y = observe(scene.scene.image, spectral, spatial);
  }
  Problem problem() const { return Problem{y.ms, y.hs, spectral, spatial}; }
};

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("objective is zero at the generating factors") {
  const Desk d(1);
  CHECK(objective(d.scene.scene.endmembers, d.scene.scene.abundances, d.problem()) < 1e-24);
}

TEST_CASE("objective vanishes on the non-identifiable family") {
  const auto inst = build_counterexample(0.2);
  const auto member = feasible_family(inst, 0.2, 0.0);
  const Problem p{inst.observed.ms, inst.observed.hs, inst.spectral, inst.spatial};
  CHECK(objective(member.endmembers, member.abundances, p) < 1e-24);
}

TEST_CASE("objective by hand on a scalar problem") {
  const Matrix ms = Matrix::Constant(1, 1, 2.0);
  const Matrix hs = Matrix::Constant(1, 1, 3.0);
  const Matrix one = Matrix::Ones(1, 1);
  const SpatialResponse g = SpatialResponse::identity(1);
  CHECK(objective(one, one, Problem{ms, hs, one, g}) == doctest::Approx(5.0));
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    const SpatialResponse g = oracle::random_overlapping_spatial(3, rng);
    const Index m = 5, mm = 2, n = 3, l = g.sr_pixels();
    const Matrix f = oracle::random_uniform(mm, m, rng);
    const Matrix ms = oracle::random_uniform(mm, l, rng);
    const Matrix hs = oracle::random_uniform(m, g.hs_pixels(), rng);
    const Matrix a = oracle::random_uniform(m, n, rng);
    const Matrix s = oracle::random_simplex_columns(n, l, rng);
    const Problem p{ms, hs, f, g};
    const Gradient grad = objective_gradient(a, s, p);
    const double h = 1e-6;
    Matrix fd_a(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) {
        Matrix ap = a, am = a;
        ap(i, j) += h;
        am(i, j) -= h;
        fd_a(i, j) = (objective(ap, s, p) - objective(am, s, p)) / (2 * h);
      }
    Matrix fd_s(n, l);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < l; ++j) {
        Matrix sp = s, sm = s;
        sp(i, j) += h;
        sm(i, j) -= h;
        fd_s(i, j) = (objective(a, sp, p) - objective(a, sm, p)) / (2 * h);
      }
    CHECK((grad.endmembers - fd_a).norm() / fd_a.norm() < 1e-5);
    CHECK((grad.abundances - fd_s).norm() / fd_s.norm() < 1e-5);
  }
}

TEST_CASE("simplex projection examples") {
  CHECK((project_simplex(Vector::Constant(2, 0.5)) - Vector::Constant(2, 0.5)).norm() == 0.0);
  Vector v(2);
  v << 2.0, 0.0;
  CHECK((project_simplex(v) - Vector::Unit(2, 0)).norm() < 1e-15);
  v << 0.4, 0.2;
  Vector expected(2);
  expected << 0.6, 0.4;
  CHECK((project_simplex(v) - expected).norm() < 1e-15);
  CHECK(code_of([] { project_simplex(Vector(0)); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("simplex projection matches the KKT oracle and is idempotent") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(1, 12);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int t = 0; t < 1000; ++t) {
    Vector v(size(rng));
    for (Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    const Vector p = project_simplex(v);
    CHECK((p - oracle::simplex_projection_kkt(v)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    CHECK((project_simplex(p) - p).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("SPA recovers pure columns") {
  std::mt19937_64 rng(4);
  const Matrix a = oracle::random_uniform(10, 4, rng);
  std::vector<Index> perm{2, 0, 3, 1};
  Matrix y(10, 4);
  for (Index j = 0; j < 4; ++j) y.col(j) = a.col(perm[static_cast<std::size_t>(j)]);
  const SpaResult r = spa_select(y, 4);
  std::set<Index> picked(r.columns.begin(), r.columns.end());
  CHECK(picked == std::set<Index>{0, 1, 2, 3});
  for (Index t = 0; t < 4; ++t) {
    double best = 1e9;
    for (Index j = 0; j < 4; ++j) best = std::min(best, (r.endmembers.col(t) - a.col(j)).norm());
    CHECK(best < 1e-12);
  }

  Matrix dup(10, 6);
  dup << y, y.col(0), y.col(2);
  const SpaResult rd = spa_select(dup, 4);
  std::set<std::vector<double>> cols_a, cols_b;
  for (Index t = 0; t < 4; ++t) {
    const Vector ca = r.endmembers.col(t), cb = rd.endmembers.col(t);
    cols_a.insert(std::vector<double>(ca.data(), ca.data() + ca.size()));
    cols_b.insert(std::vector<double>(cb.data(), cb.data() + cb.size()));
  }
  CHECK(cols_a == cols_b);

  Index biggest = 0;
  y.colwise().norm().maxCoeff(&biggest);
  CHECK(spa_select(y, 1).columns == std::vector<Index>{biggest});
}

TEST_CASE("SPA breaks ties by the lowest index and reports rank collapse") {
  Matrix y(2, 3);
  y << 1, 0, 1, 0, 1, 0;
  CHECK(spa_select(y, 1).columns == std::vector<Index>{0});
  CHECK(code_of([&] { spa_select(y, 3); }) != ErrorCode{});
}

TEST_CASE("noiseless desk scenes are solved to a zero objective") {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const Desk d(seed);
    const Solution s = solve_cosmf(d.problem(), d.config.endmembers, SolverConfig{});
    CHECK(s.objective() < 1e-8);
    CHECK(trace_non_increasing(s.objective_trace));
    CHECK(feasible(s));
    CHECK(s.objective_trace.size() == static_cast<std::size_t>(s.iterations) + 1);
  }
}

TEST_CASE("a warm start at the truth stops immediately") {
  const Desk d(3);
  SolverConfig c;
  c.init = InitMode::kProvided;
  InitialGuess guess{d.scene.scene.endmembers, d.scene.scene.abundances};
  const Solution s = solve_cosmf(d.problem(), d.config.endmembers, c, guess);
  CHECK(s.iterations <= 1);
  CHECK(s.termination == Termination::kZeroObjective);
  CHECK(s.objective() < 1e-24);
  CHECK((s.endmembers - d.scene.scene.endmembers).norm() < 1e-12);
}

TEST_CASE("random initialisation descends monotonically and stays feasible") {
  const Desk d(4);
  for (StepRule rule : {StepRule::kBacktracking, StepRule::kFixedLipschitz}) {
    SolverConfig c;
    c.init = InitMode::kRandom;
    c.step_rule = rule;
    c.max_outer_iterations = 200;
    c.seed = 8;
    const Solution s = solve_cosmf(d.problem(), d.config.endmembers, c);
    CHECK(trace_non_increasing(s.objective_trace));
    CHECK(s.objective() < s.objective_trace.front());
    CHECK(feasible(s));
    const Solution again = solve_cosmf(d.problem(), d.config.endmembers, c);
    CHECK(again.objective_trace == s.objective_trace);
    CHECK(again.abundances == s.abundances);
  }
}

TEST_CASE("noisy observations still give a monotone trace") {
  const Desk d(5);
  const Matrix ms = add_noise(d.y.ms, 20.0, 1);
  const Matrix hs = add_noise(d.y.hs, 20.0, 2);
  SolverConfig c;
  c.max_outer_iterations = 300;
  const Solution s = solve_cosmf(Problem{ms, hs, d.spectral, d.spatial}, d.config.endmembers, c);
  CHECK(trace_non_increasing(s.objective_trace));
  CHECK(feasible(s));
}

TEST_CASE("solver configuration and input checks") {
  SolverConfig c;
  c.max_outer_iterations = 0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::kInvalidArgument);
  c = SolverConfig{};
  c.relative_tolerance = 0.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::kInvalidArgument);
  const Desk d(6);
  const Matrix bad = Matrix::Ones(3, 3);
  CHECK(code_of([&] { solve_cosmf(Problem{bad, d.y.hs, d.spectral, d.spatial}, 6, SolverConfig{}); }) ==
        ErrorCode::kDimensionMismatch);
  Matrix nan_ms = d.y.ms;
  nan_ms(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([&] { solve_cosmf(Problem{nan_ms, d.y.hs, d.spectral, d.spatial}, 6, SolverConfig{}); }) ==
        ErrorCode::kNumerical);
  CHECK(parse_step_rule(to_string(StepRule::kFixedLipschitz)) == StepRule::kFixedLipschitz);
  CHECK(parse_init_mode(to_string(InitMode::kRandom)) == InitMode::kRandom);
}

}  // TEST_SUITE
