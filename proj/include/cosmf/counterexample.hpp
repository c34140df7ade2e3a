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

// A three-material instance on which the coupled factorization has a whole
// family of exact solutions, so recovery can be no better than sqrt(2) rho
// on the first pixel even though every assumption but dominance holds.
//
//   Ā = [1-ρ  ρ   0]    S̄ = [1 1 0 0 0 0]    F = [1 1 1]
//       [ρ   1-ρ  0]        [0 0 1 1 0 0]    windows {0,1} {2,3} {4,5}
//       [0    0   1]        [0 0 0 0 1 1]    weights (1/2, 1/2)

#ifndef COSMF_COUNTEREXAMPLE_HPP
#define COSMF_COUNTEREXAMPLE_HPP

#include "cosmf/linalg.hpp"
#include "cosmf/model.hpp"

#include <vector>

namespace cosmf {

struct CounterexampleInstance {
  double rho = 0.0;
  Matrix endmembers;   // 3 x 3
  Matrix abundances;   // 3 x 6
  Matrix spectral;     // 1 x 3
  SpatialResponse spatial;
  ObservedPair observed;
};

/// 0 <= rho < 0.5.
CounterexampleInstance build_counterexample(double rho);

struct FamilyMember {
  Matrix endmembers;  // identity
  Matrix abundances;
};

/// Exact solution with A = I parametrised by -rho <= alpha_i <= rho.
FamilyMember feasible_family(const CounterexampleInstance& instance, double alpha1, double alpha2);

struct CounterexampleReport {
  double rho = 0.0;
  double alpha1 = 0.0;
  double objective = 0.0;        // of the family member at (alpha1, 0)
  double error = 0.0;            // ||Ā s̄_1 - A s_1||
  double expected_error = 0.0;   // sqrt(2) |alpha1|
  bool identity_holds = false;   // |error - expected| <= 1e-12
  std::vector<double> grid_alpha;
  std::vector<double> grid_error;
  std::vector<double> grid_objective;
  double grid_sup = 0.0;
  double expected_sup = 0.0;     // sqrt(2) rho
  bool sup_holds = false;
  double certificate_bound = 0.0;  // max per-pixel bound of the instance's certificate
  bool within_bound = false;
  bool feasible = false;           // every grid member has objective <= 1e-12 and simplex columns
};

/// Error identity at alpha1 plus a `grid_points` sweep of alpha1 over
/// [-rho, rho], compared against the certificate bound.
CounterexampleReport verify_counterexample(const CounterexampleInstance& instance, double alpha1,
                                           int grid_points = 21);

}  // namespace cosmf

#endif  // COSMF_COUNTEREXAMPLE_HPP
