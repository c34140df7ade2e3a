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

#include "cosmf/solver.hpp"

#include "cosmf/error.hpp"
#include "cosmf/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace cosmf {

namespace {

void check_problem(const Problem& p) {
  require(p.spectral.rows() == p.ms.rows(), ErrorCode::kDimensionMismatch,
          "problem: spectral response rows differ from MS bands");
  require(p.spectral.cols() == p.hs.rows(), ErrorCode::kDimensionMismatch,
          "problem: spectral response columns differ from HS bands");
  require(p.ms.cols() == p.spatial.sr_pixels(), ErrorCode::kDimensionMismatch,
          "problem: MS pixel count differs from the spatial response");
  require(p.hs.cols() == p.spatial.hs_pixels(), ErrorCode::kDimensionMismatch,
          "problem: HS pixel count differs from the spatial response");
}

void check_factors(const Matrix& a, const Matrix& s, const Problem& p) {
  require(a.rows() == p.hs.rows() && s.cols() == p.ms.cols() && a.cols() == s.rows(),
          ErrorCode::kDimensionMismatch, "factor shapes do not match the problem");
}

// Squared spectral norm via the smaller Gram matrix.
double norm2_sq(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix gram = m.rows() <= m.cols() ? Matrix(m * m.transpose()) : Matrix(m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues().maxCoeff());
}

// Upper bound on ||G||_2^2 from max column sum times max row sum.
double spatial_norm_sq_bound(const SpatialResponse& g) {
  double col_max = 0.0;
  for (const Window& w : g.windows()) {
    double s = 0.0;
    for (double v : w.weights) s += std::abs(v);
    col_max = std::max(col_max, s);
  }
  return col_max * g.max_row_sum();
}

double eval(const Matrix& fa, const Matrix& a, const Matrix& s, const Problem& p) {
  return (p.ms - fa * s).squaredNorm() + (p.hs - a * spatial_decimate(s, p.spatial)).squaredNorm();
}

void clip_box(Matrix& a) { a = a.cwiseMax(0.0).cwiseMin(1.0); }

// Index of the heaviest window covering each SR pixel (lowest index on ties).
std::vector<Index> heaviest_windows(const SpatialResponse& g) {
  std::vector<Index> best(static_cast<std::size_t>(g.sr_pixels()), -1);
  std::vector<double> weight(best.size(), -1.0);
  for (Index i = 0; i < g.hs_pixels(); ++i) {
    const Window& w = g.window(i);
    for (std::size_t k = 0; k < w.pixels.size(); ++k) {
      const auto j = static_cast<std::size_t>(w.pixels[k]);
      if (w.weights[k] > weight[j]) {
        weight[j] = w.weights[k];
        best[j] = i;
      }
    }
  }
  return best;
}

struct BlockStep {
  double lipschitz_upper;
  double lipschitz;  // last accepted estimate, reused as the next starting point
};

// One projected gradient step on a block. Never increases the objective.
void projected_step(Matrix& x, double& f, const Matrix& grad, BlockStep& step, StepRule rule,
                    const std::function<void(Matrix&)>& project,
                    const std::function<double(const Matrix&)>& evaluate) {
  const double upper = step.lipschitz_upper;
  if (!(upper > 0.0)) return;  // zero curvature: the block does not affect the objective
  double lip = rule == StepRule::kFixedLipschitz ? upper : std::min(upper, std::max(step.lipschitz * 0.5, upper * 1e-8));
  while (true) {
    Matrix cand = x - grad / lip;
    project(cand);
    const Matrix d = cand - x;
    const double f_new = evaluate(cand);
    require(std::isfinite(f_new), ErrorCode::kNumerical, "solver: non-finite objective");
    const double model = f + (grad.array() * d.array()).sum() + 0.5 * lip * d.squaredNorm();
    if (f_new <= model || lip >= upper) {
      if (f_new <= f) {
        x = std::move(cand);
        f = f_new;
      }
      step.lipschitz = lip;
      return;
    }
    lip = std::min(2.0 * lip, upper);
  }
}

}  // namespace

void SolverConfig::validate() const {
  require(max_outer_iterations >= 1, ErrorCode::kInvalidArgument, "solver config: max_outer_iterations >= 1");
  require(inner_steps >= 1, ErrorCode::kInvalidArgument, "solver config: inner_steps >= 1");
  require(relative_tolerance > 0.0, ErrorCode::kInvalidArgument, "solver config: relative_tolerance > 0");
  require(support_threshold > 0.0, ErrorCode::kInvalidArgument, "solver config: support_threshold > 0");
}

double objective(const Matrix& endmembers, const Matrix& abundances, const Problem& problem) {
  check_problem(problem);
  check_factors(endmembers, abundances, problem);
  const double f = eval(problem.spectral * endmembers, endmembers, abundances, problem);
  return f;
}

Gradient objective_gradient(const Matrix& endmembers, const Matrix& abundances, const Problem& p) {
  check_problem(p);
  check_factors(endmembers, abundances, p);
  const Matrix fa = p.spectral * endmembers;
  const Matrix sg = spatial_decimate(abundances, p.spatial);
  const Matrix r_ms = fa * abundances - p.ms;
  const Matrix r_hs = endmembers * sg - p.hs;
  Gradient g;
  g.endmembers = 2.0 * (p.spectral.transpose() * (r_ms * abundances.transpose()) + r_hs * sg.transpose());
  g.abundances = 2.0 * (fa.transpose() * r_ms + spatial_adjoint(endmembers.transpose() * r_hs, p.spatial));
  return g;
}

Vector project_simplex(const Eigen::Ref<const Vector>& v) {
  require(v.size() > 0, ErrorCode::kInvalidArgument, "project_simplex: empty vector");
  require(v.allFinite(), ErrorCode::kInvalidArgument, "project_simplex: non-finite entry");
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

void project_columns_to_simplex(Matrix& m) {
  for (Index c = 0; c < m.cols(); ++c) m.col(c) = project_simplex(m.col(c));
}

SpaResult spa_select(const Matrix& hs, Index endmembers) {
  require(endmembers >= 1, ErrorCode::kInvalidArgument, "spa: needs N >= 1");
  require(endmembers <= hs.cols(), ErrorCode::kInvalidArgument, "spa: N exceeds the number of HS pixels");
  require(endmembers <= hs.rows(), ErrorCode::kInvalidArgument, "spa: N exceeds the number of bands");
  Matrix residual = hs;
  SpaResult out;
  const double scale = hs.colwise().squaredNorm().maxCoeff();
  require(scale > 0.0, ErrorCode::kNumerical, "spa: all HS pixels are zero");
  for (Index t = 0; t < endmembers; ++t) {
    const Eigen::RowVectorXd norms = residual.colwise().squaredNorm();
    Index pick = 0;
    for (Index c = 1; c < norms.size(); ++c)
      if (norms(c) > norms(pick)) pick = c;
    require(norms(pick) > 1e-24 * scale, ErrorCode::kNumerical,
            "spa: residual vanished after " + std::to_string(t) + " of " + std::to_string(endmembers) +
                " picks (rank collapse)");
    const Vector u = residual.col(pick) / std::sqrt(norms(pick));
    residual -= u * (u.transpose() * residual);
    out.columns.push_back(pick);
  }
  out.endmembers = select_columns(hs, out.columns);
  clip_box(out.endmembers);
  return out;
}

Matrix spa_initialize(const Matrix& hs, Index endmembers) { return spa_select(hs, endmembers).endmembers; }

Matrix fit_abundances(const Matrix& endmembers, const Problem& p, double support_threshold) {
  check_problem(p);
  require(endmembers.rows() == p.hs.rows(), ErrorCode::kDimensionMismatch, "fit_abundances: band count differs");
  const Index n = endmembers.cols();
  const Index l = p.ms.cols();

  Matrix hs_abundances = endmembers.completeOrthogonalDecomposition().solve(p.hs);
  project_columns_to_simplex(hs_abundances);

  const Matrix fa = p.spectral * endmembers;
  Eigen::CompleteOrthogonalDecomposition<Matrix> full(fa);
  const std::vector<Index> window_of = heaviest_windows(p.spatial);

  std::map<std::vector<Index>, Eigen::ColPivHouseholderQR<Matrix>> restricted;
  Matrix s = Matrix::Zero(n, l);
  for (Index j = 0; j < l; ++j) {
    std::vector<Index> support;
    const Index w = window_of[static_cast<std::size_t>(j)];
    if (w >= 0)
      for (Index k = 0; k < n; ++k)
        if (hs_abundances(k, w) > support_threshold) support.push_back(k);
    bool solved = false;
    if (!support.empty() && static_cast<Index>(support.size()) <= fa.rows()) {
      auto it = restricted.find(support);
      if (it == restricted.end())
        it = restricted.emplace(support, Eigen::ColPivHouseholderQR<Matrix>(select_columns(fa, support))).first;
      if (it->second.rank() == static_cast<Index>(support.size())) {
        const Vector x = it->second.solve(Vector(p.ms.col(j)));
        for (std::size_t q = 0; q < support.size(); ++q) s(support[q], j) = x(static_cast<Index>(q));
        solved = true;
      }
    }
    if (!solved) s.col(j) = full.solve(Vector(p.ms.col(j)));
    s.col(j) = project_simplex(s.col(j));
  }
  return s;
}

Solution solve_cosmf(const Problem& p, Index n, const SolverConfig& config, const InitialGuess& guess) {
  config.validate();
  check_problem(p);
  require(n >= 1, ErrorCode::kInvalidArgument, "solve: needs N >= 1");
  require(p.ms.allFinite() && p.hs.allFinite(), ErrorCode::kNumerical, "solve: non-finite observations");
  const Index m = p.hs.rows();
  const Index l = p.ms.cols();

  Matrix a;
  Matrix s;
  switch (config.init) {
    case InitMode::kPurePixel:
      a = spa_initialize(p.hs, n);
      s = fit_abundances(a, p, config.support_threshold);
      break;
    case InitMode::kRandom: {
      Rng rng(derive_seed(config.seed, {7}));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::exponential_distribution<double> expo(1.0);
      a.resize(m, n);
      for (Index c = 0; c < n; ++c)
        for (Index r = 0; r < m; ++r) a(r, c) = unit(rng);
      s.resize(n, l);
      for (Index c = 0; c < l; ++c) {
        for (Index r = 0; r < n; ++r) s(r, c) = expo(rng);
        s.col(c) /= s.col(c).sum();
      }
      break;
    }
    case InitMode::kProvided:
      require(guess.endmembers.has_value(), ErrorCode::kInvalidArgument,
              "solve: provided initialisation needs initial endmembers");
      a = *guess.endmembers;
      require(a.rows() == m && a.cols() == n, ErrorCode::kDimensionMismatch,
              "solve: initial endmembers have the wrong shape");
      if (guess.abundances) {
        s = *guess.abundances;
        require(s.rows() == n && s.cols() == l, ErrorCode::kDimensionMismatch,
                "solve: initial abundances have the wrong shape");
      } else {
        clip_box(a);
        s = fit_abundances(a, p, config.support_threshold);
      }
      break;
  }
  clip_box(a);
  project_columns_to_simplex(s);

  const double g_norm_sq = spatial_norm_sq_bound(p.spatial);
  const double f_norm_sq = norm2_sq(p.spectral);
  Matrix fa = p.spectral * a;
  double f = eval(fa, a, s, p);
  require(std::isfinite(f), ErrorCode::kNumerical, "solve: non-finite initial objective");
  // Residuals below the rounding level of the data are indistinguishable from zero.
  const double eps = std::numeric_limits<double>::epsilon();
  const double zero_floor = eps * eps * (p.ms.squaredNorm() + p.hs.squaredNorm());

  Solution sol;
  sol.objective_trace.push_back(f);
  BlockStep a_step{0.0, 0.0};
  BlockStep s_step{0.0, 0.0};
  a_step.lipschitz = s_step.lipschitz = std::numeric_limits<double>::infinity();

  auto project_box = [](Matrix& x) { clip_box(x); };
  auto project_simplex_cols = [](Matrix& x) { project_columns_to_simplex(x); };

  if (f <= zero_floor) {
    sol.termination = Termination::kZeroObjective;
  } else {
    sol.termination = Termination::kIterationCap;
    for (int it = 1; it <= config.max_outer_iterations; ++it) {
      const double f_prev = f;

      const Matrix sg = spatial_decimate(s, p.spatial);
      a_step.lipschitz_upper = 2.0 * (f_norm_sq * norm2_sq(s) + norm2_sq(sg));
      for (int k = 0; k < config.inner_steps; ++k) {
        const Matrix r_ms = fa * s - p.ms;
        const Matrix r_hs = a * sg - p.hs;
        const Matrix grad =
            2.0 * (p.spectral.transpose() * (r_ms * s.transpose()) + r_hs * sg.transpose());
        projected_step(a, f, grad, a_step, config.step_rule, project_box, [&](const Matrix& cand) {
          return (p.ms - p.spectral * cand * s).squaredNorm() + (p.hs - cand * sg).squaredNorm();
        });
        fa = p.spectral * a;
      }

      s_step.lipschitz_upper = 2.0 * (norm2_sq(fa) + norm2_sq(a) * g_norm_sq);
      for (int k = 0; k < config.inner_steps; ++k) {
        const Matrix r_ms = fa * s - p.ms;
        const Matrix r_hs = a * spatial_decimate(s, p.spatial) - p.hs;
        const Matrix grad =
            2.0 * (fa.transpose() * r_ms + spatial_adjoint(a.transpose() * r_hs, p.spatial));
        projected_step(s, f, grad, s_step, config.step_rule, project_simplex_cols,
                       [&](const Matrix& cand) { return eval(fa, a, cand, p); });
      }

      sol.objective_trace.push_back(f);
      sol.iterations = it;
      if (f <= zero_floor) {
        sol.termination = Termination::kZeroObjective;
        break;
      }
      if (f_prev - f <= config.relative_tolerance * f_prev) {
        sol.termination = Termination::kConverged;
        break;
      }
    }
  }
  sol.endmembers = std::move(a);
  sol.abundances = std::move(s);
  return sol;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kZeroObjective: return "zero-objective";
    case Termination::kIterationCap: return "iteration-cap";
  }
  return "unknown";
}

const char* to_string(StepRule r) {
  return r == StepRule::kFixedLipschitz ? "fixed-lipschitz" : "backtracking";
}

const char* to_string(InitMode m) {
  switch (m) {
    case InitMode::kPurePixel: return "pure-pixel";
    case InitMode::kRandom: return "random";
    case InitMode::kProvided: return "provided";
  }
  return "unknown";
}

StepRule parse_step_rule(const std::string& name) {
  if (name == "fixed-lipschitz" || name == "fixed") return StepRule::kFixedLipschitz;
  if (name == "backtracking") return StepRule::kBacktracking;
  fail(ErrorCode::kInvalidArgument, "unknown step rule '" + name + "'");
}

InitMode parse_init_mode(const std::string& name) {
  if (name == "pure-pixel" || name == "spa") return InitMode::kPurePixel;
  if (name == "random") return InitMode::kRandom;
  if (name == "provided") return InitMode::kProvided;
  fail(ErrorCode::kInvalidArgument, "unknown init mode '" + name + "'");
}

}  // namespace cosmf
