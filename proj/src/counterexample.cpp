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

#include "cosmf/bounds.hpp"
#include "cosmf/error.hpp"
#include "cosmf/solver.hpp"

#include <cmath>
#include <string>

namespace cosmf {

namespace {

constexpr double kExactTol = 1e-12;

void check_alpha(double rho, double alpha, const char* name) {
  require(alpha >= -rho && alpha <= rho, ErrorCode::kInvalidArgument,
          std::string("counterexample: ") + name + " = " + std::to_string(alpha) + " is outside [-rho, rho] = [" +
              std::to_string(-rho) + ", " + std::to_string(rho) + "]");
}

}  // namespace

CounterexampleInstance build_counterexample(double rho) {
  require(rho >= 0.0 && rho < 0.5, ErrorCode::kInvalidArgument,
          "counterexample: rho must lie in [0, 0.5)");
  CounterexampleInstance inst;
  inst.rho = rho;
  inst.endmembers.resize(3, 3);
  inst.endmembers << 1.0 - rho, rho, 0.0,
                     rho, 1.0 - rho, 0.0,
                     0.0, 0.0, 1.0;
  inst.abundances.resize(3, 6);
  inst.abundances << 1, 1, 0, 0, 0, 0,
                     0, 0, 1, 1, 0, 0,
                     0, 0, 0, 0, 1, 1;
  inst.spectral = Matrix::Ones(1, 3);
  inst.spatial = SpatialResponse(6, {{{0, 1}, {0.5, 0.5}}, {{2, 3}, {0.5, 0.5}}, {{4, 5}, {0.5, 0.5}}});
  inst.observed = observe(reconstruct(inst.endmembers, inst.abundances), inst.spectral, inst.spatial);
  return inst;
}

FamilyMember feasible_family(const CounterexampleInstance& inst, double alpha1, double alpha2) {
  const double rho = inst.rho;
  check_alpha(rho, alpha1, "alpha1");
  check_alpha(rho, alpha2, "alpha2");
  FamilyMember out;
  out.endmembers = Matrix::Identity(3, 3);
  out.abundances.resize(3, 6);
  out.abundances << 1 - rho + alpha1, 1 - rho - alpha1, rho + alpha2, rho - alpha2, 0, 0,
                    rho - alpha1, rho + alpha1, 1 - rho - alpha2, 1 - rho + alpha2, 0, 0,
                    0, 0, 0, 0, 1, 1;
  return out;
}

CounterexampleReport verify_counterexample(const CounterexampleInstance& inst, double alpha1,
                                           int grid_points) {
  require(grid_points >= 2, ErrorCode::kInvalidArgument, "counterexample: grid needs at least 2 points");
  check_alpha(inst.rho, alpha1, "alpha1");
  const Problem problem{inst.observed.ms, inst.observed.hs, inst.spectral, inst.spatial};
  const Vector truth = inst.endmembers * inst.abundances.col(0);
  auto pixel_error = [&](const FamilyMember& fm) {
    return (truth - fm.endmembers * fm.abundances.col(0)).norm();
  };

  CounterexampleReport rep;
  rep.rho = inst.rho;
  rep.alpha1 = alpha1;
  const FamilyMember at = feasible_family(inst, alpha1, 0.0);
  rep.objective = objective(at.endmembers, at.abundances, problem);
  rep.error = pixel_error(at);
  rep.expected_error = std::sqrt(2.0) * std::abs(alpha1);
  rep.identity_holds = std::abs(rep.error - rep.expected_error) <= kExactTol;

  rep.feasible = true;
  rep.grid_sup = 0.0;
  for (int g = 0; g < grid_points; ++g) {
    // Endpoints are hit exactly so the supremum is attained on the grid.
    const double a = g == 0 ? -inst.rho
                     : g == grid_points - 1
                         ? inst.rho
                         : -inst.rho + 2.0 * inst.rho * static_cast<double>(g) / (grid_points - 1);
    const FamilyMember fm = feasible_family(inst, a, 0.0);
    const double obj = objective(fm.endmembers, fm.abundances, problem);
    bool simplex = true;
    for (Index c = 0; c < fm.abundances.cols(); ++c)
      simplex = simplex && in_simplex(fm.abundances.col(c), kExactTol);
    rep.feasible = rep.feasible && simplex && obj <= kExactTol;
    const double err = pixel_error(fm);
    rep.grid_alpha.push_back(a);
    rep.grid_error.push_back(err);
    rep.grid_objective.push_back(obj);
    rep.grid_sup = std::max(rep.grid_sup, err);
    if (std::abs(err - std::sqrt(2.0) * std::abs(a)) > kExactTol) rep.identity_holds = false;
  }
  rep.expected_sup = std::sqrt(2.0) * inst.rho;
  rep.sup_holds = std::abs(rep.grid_sup - rep.expected_sup) <= kExactTol;

  const Certificate cert = certify(inst.endmembers, inst.abundances, inst.spectral, inst.spatial);
  rep.certificate_bound = cert.max_bound();
  rep.within_bound = rep.error <= cert.per_pixel_bound(0) && rep.grid_sup <= cert.per_pixel_bound(0);
  return rep;
}

}  // namespace cosmf
