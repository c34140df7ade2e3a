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

// Synthetic scenes that satisfy the recovery assumptions by construction,
// the grid-based spatial/spectral responses that observe them, and noise and
// error metrics for experiments.

#ifndef COSMF_SCENEGEN_HPP
#define COSMF_SCENEGEN_HPP

#include "cosmf/linalg.hpp"
#include "cosmf/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cosmf {

enum class KernelKind { kUniform, kGaussian };

/// How endmember matrices are drawn before rejection.
///  kUniform: i.i.d. U[0,1] entries, rejected until the dominance condition
///            holds. Practical only when M is large relative to 8 N^2.
///  kPlanted: one distinct "signature band" per endmember where that
///            endmember is near 1 and all others are below 1/(4N); every
///            other entry is i.i.d. U[0,1]. Dominance then holds by
///            construction for any M >= N.
enum class EndmemberSampling { kUniform, kPlanted };

struct SceneConfig {
  Index bands = 50;      // M
  Index ms_bands = 6;    // Mm
  Index endmembers = 6;  // N
  Index width = 16;
  Index height = 16;
  Index factor = 2;      // d; Lh = L / d^2
  int max_support = 3;   // k_max, cap on materials per HS pixel
  KernelKind kernel = KernelKind::kGaussian;
  Index kernel_size = 3;
  double kernel_variance = 1.0;
  EndmemberSampling sampling = EndmemberSampling::kPlanted;
  int max_draws = 10000;  // rejection budget for the endmember matrix
  std::uint64_t seed = 0;

  Index sr_pixels() const { return width * height; }
  Index hs_pixels() const { return (width / factor) * (height / factor); }
  void validate() const;
};

/// One window per d x d cell of a w x h image (row-major pixel and cell
/// numbering). The kernel footprint starts at cell_origin + floor((d - k)/2)
/// along each axis, is clipped at the image border, and its weights are
/// renormalised to sum to one. Gaussian weights are exp(-|Δ|^2 / (2 var))
/// with Δ measured from the footprint centre.
SpatialResponse build_spatial_response(Index width, Index height, KernelKind kernel,
                                       Index kernel_size, double variance, Index factor);
SpatialResponse build_spatial_response(const SceneConfig& config);

/// Mm x M box averages over contiguous bands; the first M mod Mm blocks get
/// one extra band.
Matrix build_spectral_response(Index bands, Index ms_bands);

struct GeneratedScene {
  Scene scene;
  std::vector<Index> pure_windows;             // HS window that is pure in material t
  std::vector<std::vector<int>> cell_supports; // material set per d x d cell
  Index cell_columns = 0;
  Index cell_rows = 0;
  int endmember_draws = 0;                     // draws until acceptance
  std::uint64_t seed = 0;
};

/// Draws a scene whose endmembers satisfy full rank, dominance and
/// krank(F Ā) >= k_max, whose decimated abundances contain an exact identity
/// block at `pure_windows`, and whose HS pixels mix at most k_max materials.
///
/// Cell supports follow vertical stripes: palette stripes draw from at most
/// k_max materials and are separated by bridge stripes restricted to the
/// materials shared by both neighbours, wide enough that no window reaches
/// two palettes. Mixed pixels get flat Dirichlet abundances on their cell's
/// support.
GeneratedScene generate_scene(const SceneConfig& config, const Matrix& spectral,
                              const SpatialResponse& spatial);
GeneratedScene generate_scene(const SceneConfig& config);

/// Y + E with E Gaussian, rescaled so that 10 log10(||Y||^2 / ||E||^2) is
/// exactly `snr_db`. +infinity returns Y unchanged.
Matrix add_noise(const Matrix& y, double snr_db, std::uint64_t seed);

/// ||X - X_est||_F^2 / (rows * cols).
double mse(const Matrix& truth, const Matrix& estimate);

const char* to_string(KernelKind kind);
const char* to_string(EndmemberSampling sampling);
KernelKind parse_kernel_kind(const std::string& name);
EndmemberSampling parse_endmember_sampling(const std::string& name);

}  // namespace cosmf

#endif  // COSMF_SCENEGEN_HPP
