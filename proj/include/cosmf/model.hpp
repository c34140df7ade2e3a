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

// Observation model for coupled MS/HS imaging: an SR image X = A S built from
// endmembers A (bands x materials, entries in [0,1]) and abundances S
// (materials x pixels, columns on the unit simplex), seen through a spectral
// response F (MS image F X) and a blur/decimation G (HS image X G).
//
// Matrices are dense Eigen matrices; columns are pixels or endmembers.

#ifndef COSMF_MODEL_HPP
#define COSMF_MODEL_HPP

#include "cosmf/linalg.hpp"

#include <string>
#include <vector>

namespace cosmf {

/// Absolute tolerance for simplex membership (nonnegativity and column sums).
inline constexpr double kSimplexTolerance = 1e-9;

/// Footprint of one HS pixel: the SR pixels it averages and their weights.
struct Window {
  std::vector<Index> pixels;
  std::vector<double> weights;
};

/// Spatial response G stored as one window per HS pixel rather than a dense
/// L x Lh matrix. The constructor checks only structure (window count, index
/// range, matching lengths); the modelling invariants (positive weights that
/// sum to one, full coverage, Lh < L) are reported by validate_model.
class SpatialResponse {
 public:
  SpatialResponse() = default;
  SpatialResponse(Index sr_pixels, std::vector<Window> windows);

  /// Lh = L windows, window i = {i} with weight 1.
  static SpatialResponse identity(Index sr_pixels);

  Index sr_pixels() const { return sr_pixels_; }
  Index hs_pixels() const { return static_cast<Index>(windows_.size()); }
  const std::vector<Window>& windows() const { return windows_; }
  const Window& window(Index i) const { return windows_[static_cast<std::size_t>(i)]; }

  /// Dense L x Lh matrix with g_ji at (j, i).
  Matrix dense() const;

  /// max_j sum_i g_ji; together with unit column sums this bounds ||G||_2^2.
  double max_row_sum() const;

 private:
  Index sr_pixels_ = 0;
  std::vector<Window> windows_;
};

struct Scene {
  Matrix endmembers;  // M x N
  Matrix abundances;  // N x L
  Matrix image;       // M x L
};

struct ObservedPair {
  Matrix ms;  // Mm x L
  Matrix hs;  // M x Lh
};

Matrix reconstruct(const Matrix& endmembers, const Matrix& abundances);

/// F X. Also gives the spectrally decimated endmembers F A.
Matrix spectral_decimate(const Matrix& spectral, const Matrix& x);

/// X G, computed window by window.
Matrix spatial_decimate(const Matrix& x, const SpatialResponse& spatial);

/// R G^T: scatters each HS column back onto its window with the window weights.
Matrix spatial_adjoint(const Matrix& r, const SpatialResponse& spatial);

/// S G, the abundances of the HS image. Stays on the simplex when S does.
Matrix decimate_abundances(const Matrix& abundances, const SpatialResponse& spatial);

Scene make_scene(Matrix endmembers, Matrix abundances);
ObservedPair observe(const Matrix& image, const Matrix& spectral,
                     const SpatialResponse& spatial);

bool in_simplex(const Eigen::Ref<const Vector>& v, double tol = kSimplexTolerance);

struct Violation {
  std::string invariant;
  std::string location;
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Every violated model invariant of (A, S, F, G); an empty report means the
/// inputs are a valid model instance.
ValidationReport validate_model(const Matrix& endmembers, const Matrix& abundances,
                                const Matrix& spectral, const SpatialResponse& spatial,
                                double tol = kSimplexTolerance);

}  // namespace cosmf

#endif  // COSMF_MODEL_HPP
