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

// Coupled factorization solver:
//
//   min ||Y_M - F A S||_F^2 + ||Y_H - A S G||_F^2
//   s.t. A in [0,1]^{M x N}, every column of S on the unit simplex,
//
// by alternating projected gradient on the two blocks.

#ifndef COSMF_SOLVER_HPP
#define COSMF_SOLVER_HPP

#include "cosmf/linalg.hpp"
#include "cosmf/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cosmf {

enum class StepRule { kFixedLipschitz, kBacktracking };
enum class InitMode { kPurePixel, kRandom, kProvided };
enum class Termination { kConverged, kZeroObjective, kIterationCap };

struct SolverConfig {
  int max_outer_iterations = 5000;
  int inner_steps = 1;              // projected gradient steps per block per outer iteration
  double relative_tolerance = 1e-10;
  StepRule step_rule = StepRule::kBacktracking;
  InitMode init = InitMode::kPurePixel;
  std::uint64_t seed = 0;
  double support_threshold = 1e-6;  // HS abundance level treated as absent during init

  void validate() const;
};

struct InitialGuess {
  std::optional<Matrix> endmembers;
  std::optional<Matrix> abundances;
};

struct Solution {
  Matrix endmembers;
  Matrix abundances;
  std::vector<double> objective_trace;  // initial value, then one per outer iteration
  int iterations = 0;
  Termination termination = Termination::kIterationCap;

  double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

struct Problem {
  const Matrix& ms;
  const Matrix& hs;
  const Matrix& spectral;
  const SpatialResponse& spatial;
};

double objective(const Matrix& endmembers, const Matrix& abundances, const Problem& problem);

struct Gradient {
  Matrix endmembers;
  Matrix abundances;
};

Gradient objective_gradient(const Matrix& endmembers, const Matrix& abundances, const Problem& problem);

/// Euclidean projection onto the unit simplex (sort-based threshold).
Vector project_simplex(const Eigen::Ref<const Vector>& v);
void project_columns_to_simplex(Matrix& m);

/// Successive projection: greedily picks the column with the largest residual
/// norm (lowest index on ties), then deflates the residual by that direction.
/// Returns the picked columns of Y_H clipped to [0,1], plus their indices.
struct SpaResult {
  Matrix endmembers;
  std::vector<Index> columns;
};
SpaResult spa_select(const Matrix& hs, Index endmembers);
Matrix spa_initialize(const Matrix& hs, Index endmembers);

/// Abundances fitted to Y_M given endmembers: HS abundances are estimated by
/// least squares on Y_H; each SR pixel then takes its support from the
/// heaviest window covering it and is fitted on F A restricted to that
/// support, then projected onto the simplex.
Matrix fit_abundances(const Matrix& endmembers, const Problem& problem, double support_threshold);

Solution solve_cosmf(const Problem& problem, Index endmembers, const SolverConfig& config,
                     const InitialGuess& guess = {});

const char* to_string(Termination t);
const char* to_string(StepRule r);
const char* to_string(InitMode m);
StepRule parse_step_rule(const std::string& name);
InitMode parse_init_mode(const std::string& name);

}  // namespace cosmf

#endif  // COSMF_SOLVER_HPP
