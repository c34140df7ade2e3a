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

#include "cosmf/model.hpp"

#include "cosmf/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cosmf {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

SpatialResponse::SpatialResponse(Index sr_pixels, std::vector<Window> windows)
    : sr_pixels_(sr_pixels), windows_(std::move(windows)) {
  require(sr_pixels_ >= 1, ErrorCode::kInvalidArgument,
          "spatial response needs at least one SR pixel");
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    const Window& w = windows_[i];
    require(w.pixels.size() == w.weights.size(), ErrorCode::kInvalidArgument,
            "window " + std::to_string(i) + ": pixel and weight counts differ");
    require(!w.pixels.empty(), ErrorCode::kInvalidArgument,
            "window " + std::to_string(i) + " is empty");
    for (Index p : w.pixels)
      require(p >= 0 && p < sr_pixels_, ErrorCode::kInvalidArgument,
              "window " + std::to_string(i) + ": pixel index " + std::to_string(p) +
                  " outside [0, " + std::to_string(sr_pixels_) + ")");
  }
}

SpatialResponse SpatialResponse::identity(Index sr_pixels) {
  std::vector<Window> windows(static_cast<std::size_t>(sr_pixels));
  for (Index i = 0; i < sr_pixels; ++i) windows[static_cast<std::size_t>(i)] = {{i}, {1.0}};
  return SpatialResponse(sr_pixels, std::move(windows));
}

Matrix SpatialResponse::dense() const {
  Matrix g = Matrix::Zero(sr_pixels_, hs_pixels());
  for (Index i = 0; i < hs_pixels(); ++i) {
    const Window& w = window(i);
    for (std::size_t k = 0; k < w.pixels.size(); ++k) g(w.pixels[k], i) += w.weights[k];
  }
  return g;
}

double SpatialResponse::max_row_sum() const {
  Vector rows = Vector::Zero(sr_pixels_);
  for (const Window& w : windows_)
    for (std::size_t k = 0; k < w.pixels.size(); ++k) rows(w.pixels[k]) += std::abs(w.weights[k]);
  return rows.size() == 0 ? 0.0 : rows.maxCoeff();
}

Matrix reconstruct(const Matrix& endmembers, const Matrix& abundances) {
  require(endmembers.cols() == abundances.rows(), ErrorCode::kDimensionMismatch,
          "reconstruct: endmembers " + dims(endmembers) + " vs abundances " + dims(abundances));
  return endmembers * abundances;
}

Matrix spectral_decimate(const Matrix& spectral, const Matrix& x) {
  require(spectral.cols() == x.rows(), ErrorCode::kDimensionMismatch,
          "spectral_decimate: response " + dims(spectral) + " vs input " + dims(x));
  return spectral * x;
}

Matrix spatial_decimate(const Matrix& x, const SpatialResponse& spatial) {
  require(x.cols() == spatial.sr_pixels(), ErrorCode::kDimensionMismatch,
          "spatial_decimate: input " + dims(x) + " vs " + std::to_string(spatial.sr_pixels()) +
              " SR pixels");
  Matrix out = Matrix::Zero(x.rows(), spatial.hs_pixels());
  for (Index i = 0; i < spatial.hs_pixels(); ++i) {
    const Window& w = spatial.window(i);
    for (std::size_t k = 0; k < w.pixels.size(); ++k) out.col(i) += w.weights[k] * x.col(w.pixels[k]);
  }
  return out;
}

Matrix spatial_adjoint(const Matrix& r, const SpatialResponse& spatial) {
  require(r.cols() == spatial.hs_pixels(), ErrorCode::kDimensionMismatch,
          "spatial_adjoint: input " + dims(r) + " vs " + std::to_string(spatial.hs_pixels()) +
              " HS pixels");
  Matrix out = Matrix::Zero(r.rows(), spatial.sr_pixels());
  for (Index i = 0; i < spatial.hs_pixels(); ++i) {
    const Window& w = spatial.window(i);
    for (std::size_t k = 0; k < w.pixels.size(); ++k) out.col(w.pixels[k]) += w.weights[k] * r.col(i);
  }
  return out;
}

Matrix decimate_abundances(const Matrix& abundances, const SpatialResponse& spatial) {
  return spatial_decimate(abundances, spatial);
}

Scene make_scene(Matrix endmembers, Matrix abundances) {
  Matrix image = reconstruct(endmembers, abundances);
  return Scene{std::move(endmembers), std::move(abundances), std::move(image)};
}

ObservedPair observe(const Matrix& image, const Matrix& spectral, const SpatialResponse& spatial) {
  return ObservedPair{spectral_decimate(spectral, image), spatial_decimate(image, spatial)};
}

bool in_simplex(const Eigen::Ref<const Vector>& v, double tol) {
  if (v.size() == 0) return false;
  return v.minCoeff() >= -tol && std::abs(v.sum() - 1.0) <= tol;
}

ValidationReport validate_model(const Matrix& endmembers, const Matrix& abundances,
                                const Matrix& spectral, const SpatialResponse& spatial,
                                double tol) {
  ValidationReport report;
  auto add = [&](std::string invariant, std::string location, double magnitude) {
    report.violations.push_back({std::move(invariant), std::move(location), magnitude});
  };
  auto at = [](Index r, Index c) {
    return "(" + std::to_string(r) + "," + std::to_string(c) + ")";
  };

  // Endmembers: M, N >= 1 and entries in [0,1].
  if (endmembers.rows() < 1 || endmembers.cols() < 1)
    add("endmembers: M >= 1 and N >= 1", dims(endmembers), 0.0);
  for (Index c = 0; c < endmembers.cols(); ++c)
    for (Index r = 0; r < endmembers.rows(); ++r) {
      const double a = endmembers(r, c);
      if (!std::isfinite(a)) add("endmembers: finite", at(r, c), a);
      else if (a < -tol) add("endmembers: entry >= 0", at(r, c), -a);
      else if (a > 1.0 + tol) add("endmembers: entry <= 1", at(r, c), a - 1.0);
    }

  // Abundances: each column on the unit simplex.
  for (Index c = 0; c < abundances.cols(); ++c) {
    const double lo = abundances.col(c).minCoeff();
    const double sum = abundances.col(c).sum();
    if (!std::isfinite(sum)) add("abundances: finite", "column " + std::to_string(c), sum);
    if (lo < -tol) add("abundances: entries >= 0", "column " + std::to_string(c), -lo);
    if (std::abs(sum - 1.0) > tol)
      add("abundances: column sum = 1", "column " + std::to_string(c), std::abs(sum - 1.0));
  }

  // Spectral response: Mm < M, nonnegative, each row has a positive weight.
  if (spectral.rows() >= spectral.cols())
    add("spectral: Mm < M", dims(spectral),
        static_cast<double>(spectral.rows() - spectral.cols()));
  for (Index r = 0; r < spectral.rows(); ++r) {
    if (spectral.row(r).minCoeff() < 0.0)
      add("spectral: weights >= 0", "row " + std::to_string(r), -spectral.row(r).minCoeff());
    if (spectral.cols() > 0 && spectral.row(r).maxCoeff() <= 0.0)
      add("spectral: row has a positive weight", "row " + std::to_string(r), 0.0);
  }

  // Spatial response: g_i > 0, sum(g_i) = 1, coverage, Lh < L.
  if (spatial.hs_pixels() >= spatial.sr_pixels())
    add("spatial: Lh < L",
        std::to_string(spatial.hs_pixels()) + " >= " + std::to_string(spatial.sr_pixels()),
        static_cast<double>(spatial.hs_pixels() - spatial.sr_pixels()));
  std::vector<bool> covered(static_cast<std::size_t>(spatial.sr_pixels()), false);
  for (Index i = 0; i < spatial.hs_pixels(); ++i) {
    const Window& w = spatial.window(i);
    double sum = 0.0;
    for (std::size_t k = 0; k < w.pixels.size(); ++k) {
      sum += w.weights[k];
      covered[static_cast<std::size_t>(w.pixels[k])] = true;
      if (!(w.weights[k] > 0.0))
        add("spatial: g_i > 0", "window " + std::to_string(i) + " pixel " + std::to_string(w.pixels[k]),
            -w.weights[k]);
    }
    if (std::abs(sum - 1.0) > tol)
      add("spatial: sum(g_i) = 1", "window " + std::to_string(i), std::abs(sum - 1.0));
  }
  for (std::size_t j = 0; j < covered.size(); ++j)
    if (!covered[j]) add("spatial: windows cover every SR pixel", "SR pixel " + std::to_string(j), 1.0);

  // Cross-object dimensions.
  if (endmembers.cols() != abundances.rows())
    add("dimensions: endmember count", dims(endmembers) + " vs " + dims(abundances), 0.0);
  if (spectral.cols() != endmembers.rows())
    add("dimensions: spectral response columns = M", dims(spectral) + " vs " + dims(endmembers), 0.0);
  if (abundances.cols() != spatial.sr_pixels())
    add("dimensions: abundance columns = L",
        dims(abundances) + " vs L=" + std::to_string(spatial.sr_pixels()), 0.0);
  return report;
}

}  // namespace cosmf
