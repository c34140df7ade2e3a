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

#include "cosmf/scenegen.hpp"

#include "cosmf/bounds.hpp"
#include "cosmf/error.hpp"
#include "cosmf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace cosmf {

namespace {

// Floor division for possibly negative numerators.
Index floor_div(Index a, Index b) {
  Index q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct CellBox {
  Index x0, x1, y0, y1;  // inclusive cell ranges
};

// Cell rectangle touched by each window.
std::vector<CellBox> touched_cells(const SpatialResponse& spatial, Index width, Index factor) {
  std::vector<CellBox> boxes;
  boxes.reserve(spatial.windows().size());
  for (const Window& w : spatial.windows()) {
    CellBox b{std::numeric_limits<Index>::max(), -1, std::numeric_limits<Index>::max(), -1};
    for (Index p : w.pixels) {
      const Index cx = (p % width) / factor;
      const Index cy = (p / width) / factor;
      b.x0 = std::min(b.x0, cx);
      b.x1 = std::max(b.x1, cx);
      b.y0 = std::min(b.y0, cy);
      b.y1 = std::max(b.y1, cy);
    }
    boxes.push_back(b);
  }
  return boxes;
}

// krank(A') >= k iff every k-column subset is independent.
bool all_subsets_independent(const Matrix& a_prime, Index k, double tol) {
  if (k <= 0) return true;
  if (k > std::min(a_prime.rows(), a_prime.cols())) return false;
  const double threshold = tol * sigma_max(a_prime);
  if (!(threshold > 0.0)) return false;
  return for_each_subset(a_prime.cols(), k, [&](std::span<const Index> cols) {
    return sigma_min(select_columns(a_prime, cols)) > threshold;
  });
}

Matrix draw_uniform(Index rows, Index cols, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix a(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) a(r, c) = unit(rng);
  return a;
}

Matrix draw_planted(Index rows, Index cols, Rng& rng) {
  Matrix a = draw_uniform(rows, cols, rng);
  std::vector<Index> bands(static_cast<std::size_t>(rows));
  std::iota(bands.begin(), bands.end(), 0);
  std::shuffle(bands.begin(), bands.end(), rng);
  const double n = static_cast<double>(cols);
  // Signature band of endmember t: a_tt >= 1 - 1/(8N), others <= 1/(4N), so
  // every pair has a ratio of at most (1/(8N)) / (3/4) = 1/(6N) < 1/(4N).
  std::uniform_real_distribution<double> high(1.0 - 1.0 / (8.0 * n), 1.0);
  std::uniform_real_distribution<double> low(0.0, 1.0 / (4.0 * n));
  for (Index t = 0; t < cols; ++t) {
    const Index k = bands[static_cast<std::size_t>(t)];
    for (Index c = 0; c < cols; ++c) a(k, c) = c == t ? high(rng) : low(rng);
  }
  return a;
}

struct Stripe {
  Index begin, end;  // cell columns [begin, end)
  std::vector<int> materials;
  bool bridge;
};

}  // namespace

void SceneConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::kInvalidArgument, "scene config: " + what); };
  if (bands < 2) bad("M must be at least 2");
  if (ms_bands < 1 || ms_bands >= bands) bad("need 1 <= Mm < M");
  if (endmembers < 2) bad("N must be at least 2");
  if (max_support < 1) bad("k_max must be at least 1");
  if (width < 1 || height < 1) bad("image size must be positive");
  if (factor < 1 || width % factor != 0 || height % factor != 0)
    bad("down-sampling factor must divide width and height");
  if (kernel_size < factor) bad("kernel size must be at least the down-sampling factor");
  if (kernel == KernelKind::kGaussian && !(kernel_variance > 0.0)) bad("kernel variance must be positive");
  if (hs_pixels() >= sr_pixels()) bad("need Lh < L (factor >= 2)");
  if (endmembers > hs_pixels() - endmembers) bad("need N <= Lh - N");
  if (sampling == EndmemberSampling::kPlanted && bands < endmembers)
    bad("planted sampling needs M >= N");
  if (max_draws < 1) bad("max_draws must be at least 1");
}

SpatialResponse build_spatial_response(Index width, Index height, KernelKind kernel,
                                       Index kernel_size, double variance, Index factor) {
  require(width >= 1 && height >= 1, ErrorCode::kInvalidArgument, "spatial response: empty image");
  require(factor >= 1 && width % factor == 0 && height % factor == 0, ErrorCode::kInvalidArgument,
          "spatial response: factor must divide width and height");
  require(kernel_size >= 1, ErrorCode::kInvalidArgument, "spatial response: kernel size must be positive");
  require(kernel_size >= factor, ErrorCode::kInvalidArgument,
          "spatial response: kernel size " + std::to_string(kernel_size) + " < factor " +
              std::to_string(factor) + " leaves SR pixels uncovered");
  require(kernel == KernelKind::kUniform || variance > 0.0, ErrorCode::kInvalidArgument,
          "spatial response: Gaussian variance must be positive");

  const Index cells_x = width / factor;
  const Index cells_y = height / factor;
  const Index offset = floor_div(factor - kernel_size, 2);
  const double centre = static_cast<double>(kernel_size - 1) / 2.0;
  std::vector<Window> windows;
  windows.reserve(static_cast<std::size_t>(cells_x * cells_y));
  for (Index cy = 0; cy < cells_y; ++cy) {
    for (Index cx = 0; cx < cells_x; ++cx) {
      Window w;
      double total = 0.0;
      const Index y_start = cy * factor + offset;
      const Index x_start = cx * factor + offset;
      for (Index ky = 0; ky < kernel_size; ++ky) {
        const Index y = y_start + ky;
        if (y < 0 || y >= height) continue;
        for (Index kx = 0; kx < kernel_size; ++kx) {
          const Index x = x_start + kx;
          if (x < 0 || x >= width) continue;
          double weight = 1.0;
          if (kernel == KernelKind::kGaussian) {
            const double dx = static_cast<double>(kx) - centre;
            const double dy = static_cast<double>(ky) - centre;
            weight = std::exp(-(dx * dx + dy * dy) / (2.0 * variance));
          }
          w.pixels.push_back(y * width + x);
          w.weights.push_back(weight);
          total += weight;
        }
      }
      for (double& g : w.weights) g /= total;
      windows.push_back(std::move(w));
    }
  }
  return SpatialResponse(width * height, std::move(windows));
}

SpatialResponse build_spatial_response(const SceneConfig& config) {
  return build_spatial_response(config.width, config.height, config.kernel, config.kernel_size,
                                config.kernel_variance, config.factor);
}

Matrix build_spectral_response(Index bands, Index ms_bands) {
  require(ms_bands >= 1 && ms_bands < bands, ErrorCode::kInvalidArgument,
          "spectral response: need 1 <= Mm < M");
  Matrix f = Matrix::Zero(ms_bands, bands);
  const Index base = bands / ms_bands;
  const Index extra = bands % ms_bands;
  Index start = 0;
  for (Index r = 0; r < ms_bands; ++r) {
    const Index size = base + (r < extra ? 1 : 0);
    f.row(r).segment(start, size).setConstant(1.0 / static_cast<double>(size));
    start += size;
  }
  return f;
}

GeneratedScene generate_scene(const SceneConfig& config, const Matrix& spectral,
                              const SpatialResponse& spatial) {
  config.validate();
  const Index m = config.bands;
  const Index n = config.endmembers;
  const Index l = config.sr_pixels();
  require(spectral.rows() == config.ms_bands && spectral.cols() == m, ErrorCode::kDimensionMismatch,
          "generate_scene: spectral response shape does not match the config");
  require(spatial.sr_pixels() == l && spatial.hs_pixels() == config.hs_pixels(),
          ErrorCode::kDimensionMismatch, "generate_scene: spatial response does not match the config");
  const int k_max = config.max_support;
  require(k_max <= std::min(config.ms_bands, n), ErrorCode::kInvalidArgument,
          "generate_scene: k_max = " + std::to_string(k_max) +
              " exceeds min(Mm, N), so krank(F A) < k_max and HS pixels cannot be k_max-sparse");

  GeneratedScene out;
  out.seed = config.seed;
  Rng rng(derive_seed(config.seed, {0}));

  // Endmembers, with rejection.
  constexpr double kRankTol = 1e-9;
  Matrix endmembers;
  int draws = 0;
  int accepted = 0;
  for (; draws < config.max_draws && accepted == 0; ++draws) {
    Matrix a = config.sampling == EndmemberSampling::kPlanted ? draw_planted(m, n, rng)
                                                               : draw_uniform(m, n, rng);
    const Vector s = singular_values(a);
    if (!(s(n - 1) > kRankTol * s(0))) continue;
    if (!dominance_holds(a)) continue;
    if (!all_subsets_independent(spectral * a, k_max, kRankTol)) continue;
    endmembers = std::move(a);
    accepted = 1;
  }
  if (accepted == 0)
    fail(ErrorCode::kBudgetExhausted,
         "generate_scene: no endmember matrix accepted in " + std::to_string(draws) +
             " draws (acceptance rate 0/" + std::to_string(draws) +
             "; predicted dominance probability for uniform draws >= " +
             std::to_string(dominance_probability_raw(static_cast<int>(n), static_cast<int>(m))) + ")");
  out.endmember_draws = draws;

  // Stripe layout over cell columns.
  const Index cells_x = config.width / config.factor;
  const Index cells_y = config.height / config.factor;
  out.cell_columns = cells_x;
  out.cell_rows = cells_y;
  const std::vector<CellBox> boxes = touched_cells(spatial, config.width, config.factor);
  Index span_x = 1;
  for (const CellBox& b : boxes) span_x = std::max(span_x, b.x1 - b.x0 + 1);
  const Index bridge_width = span_x - 1;
  const int palette = static_cast<int>(std::min<Index>(k_max, n));
  const bool need_overlap = bridge_width > 0;
  require(!(need_overlap && palette < 2), ErrorCode::kInvalidArgument,
          "generate_scene: k_max = 1 needs windows that do not overlap across cells");
  const int step = need_overlap ? palette - 1 : palette;

  std::vector<std::vector<int>> palettes;
  {
    std::set<int> covered;
    for (int s = 0; static_cast<Index>(covered.size()) < n; ++s) {
      std::vector<int> p;
      for (int q = 0; q < palette; ++q) p.push_back(static_cast<int>((s * step + q) % n));
      covered.insert(p.begin(), p.end());
      palettes.push_back(std::move(p));
    }
  }
  const auto n_pal = static_cast<Index>(palettes.size());
  const Index needed = n_pal * span_x + (n_pal - 1) * bridge_width;
  require(needed <= cells_x, ErrorCode::kInvalidArgument,
          "generate_scene: image is " + std::to_string(cells_x) + " cells wide but the support layout needs " +
              std::to_string(needed) + " (raise k_max, widen the image, or shrink the kernel)");

  std::vector<Stripe> stripes;
  {
    std::vector<Index> widths(static_cast<std::size_t>(n_pal), span_x);
    for (Index extra = cells_x - needed, s = 0; extra > 0; --extra, s = (s + 1) % n_pal)
      ++widths[static_cast<std::size_t>(s)];
    Index col = 0;
    for (Index s = 0; s < n_pal; ++s) {
      const auto us = static_cast<std::size_t>(s);
      stripes.push_back({col, col + widths[us], palettes[us], false});
      col += widths[us];
      if (s + 1 < n_pal && bridge_width > 0) {
        std::vector<int> shared;
        for (int t : palettes[us])
          if (std::find(palettes[us + 1].begin(), palettes[us + 1].end(), t) != palettes[us + 1].end())
            shared.push_back(t);
        stripes.push_back({col, col + bridge_width, shared, true});
        col += bridge_width;
      }
    }
  }

  out.cell_supports.assign(static_cast<std::size_t>(cells_x * cells_y), {});
  auto cell = [&](Index cx, Index cy) -> std::vector<int>& {
    return out.cell_supports[static_cast<std::size_t>(cy * cells_x + cx)];
  };
  for (const Stripe& st : stripes) {
    for (Index cy = 0; cy < cells_y; ++cy)
      for (Index cx = st.begin; cx < st.end; ++cx) {
        if (st.bridge) {
          cell(cx, cy) = st.materials;
          continue;
        }
        std::vector<int> pool = st.materials;
        std::shuffle(pool.begin(), pool.end(), rng);
        std::uniform_int_distribution<std::size_t> size(1, pool.size());
        pool.resize(size(rng));
        std::sort(pool.begin(), pool.end());
        cell(cx, cy) = std::move(pool);
      }
  }

  // Pure windows: every touched cell is set to the single material.
  std::vector<bool> reserved(out.cell_supports.size(), false);
  std::vector<Index> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  out.pure_windows.assign(static_cast<std::size_t>(n), -1);
  for (int t = 0; t < static_cast<int>(n); ++t) {
    for (const Stripe& st : stripes) {
      if (st.bridge || std::find(st.materials.begin(), st.materials.end(), t) == st.materials.end())
        continue;
      for (Index w : order) {
        const CellBox& b = boxes[static_cast<std::size_t>(w)];
        if (b.x0 < st.begin || b.x1 >= st.end) continue;
        bool free = true;
        for (Index cy = b.y0; cy <= b.y1 && free; ++cy)
          for (Index cx = b.x0; cx <= b.x1 && free; ++cx)
            free = !reserved[static_cast<std::size_t>(cy * cells_x + cx)];
        if (!free) continue;
        for (Index cy = b.y0; cy <= b.y1; ++cy)
          for (Index cx = b.x0; cx <= b.x1; ++cx) {
            reserved[static_cast<std::size_t>(cy * cells_x + cx)] = true;
            cell(cx, cy) = {t};
          }
        out.pure_windows[static_cast<std::size_t>(t)] = w;
        break;
      }
      if (out.pure_windows[static_cast<std::size_t>(t)] >= 0) break;
    }
    require(out.pure_windows[static_cast<std::size_t>(t)] >= 0, ErrorCode::kInvalidArgument,
            "generate_scene: no room for a pure window of material " + std::to_string(t));
  }

  // Abundances: flat Dirichlet on each pixel's cell support.
  Matrix abundances = Matrix::Zero(n, l);
  std::exponential_distribution<double> expo(1.0);
  for (Index p = 0; p < l; ++p) {
    const Index cx = (p % config.width) / config.factor;
    const Index cy = (p / config.width) / config.factor;
    const std::vector<int>& support = cell(cx, cy);
    if (support.size() == 1) {
      abundances(support.front(), p) = 1.0;
      continue;
    }
    double total = 0.0;
    for (int t : support) {
      const double g = expo(rng);
      abundances(t, p) = g;
      total += g;
    }
    abundances.col(p) /= total;
  }

  out.scene = make_scene(std::move(endmembers), std::move(abundances));

  if (n <= kEnumerationGuard) {
    const AssumptionReport rep =
        check_assumptions(out.scene.endmembers, out.scene.abundances, spectral, spatial);
    require(rep.all(), ErrorCode::kNumerical,
            "generate_scene: generated scene fails the assumption check (internal error)");
  }
  return out;
}

GeneratedScene generate_scene(const SceneConfig& config) {
  config.validate();
  return generate_scene(config, build_spectral_response(config.bands, config.ms_bands),
                        build_spatial_response(config));
}

Matrix add_noise(const Matrix& y, double snr_db, std::uint64_t seed) {
  require(!std::isnan(snr_db) && snr_db != -std::numeric_limits<double>::infinity(),
          ErrorCode::kInvalidArgument, "add_noise: SNR must be a number or +inf");
  if (std::isinf(snr_db)) return y;
  const double signal = y.norm();
  require(signal > 0.0, ErrorCode::kInvalidArgument, "add_noise: zero signal with finite SNR");
  Rng rng(derive_seed(seed, {1}));
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix e(y.rows(), y.cols());
  for (Index c = 0; c < e.cols(); ++c)
    for (Index r = 0; r < e.rows(); ++r) e(r, c) = normal(rng);
  const double scale = signal / (e.norm() * std::pow(10.0, snr_db / 20.0));
  return y + scale * e;
}

double mse(const Matrix& truth, const Matrix& estimate) {
  require(truth.rows() == estimate.rows() && truth.cols() == estimate.cols(),
          ErrorCode::kDimensionMismatch, "mse: shapes differ");
  require(truth.size() > 0, ErrorCode::kInvalidArgument, "mse: empty matrices");
  return (truth - estimate).squaredNorm() / static_cast<double>(truth.size());
}

const char* to_string(KernelKind kind) {
  return kind == KernelKind::kUniform ? "uniform" : "gaussian";
}

const char* to_string(EndmemberSampling sampling) {
  return sampling == EndmemberSampling::kUniform ? "uniform" : "planted";
}

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "uniform") return KernelKind::kUniform;
  if (name == "gaussian") return KernelKind::kGaussian;
  fail(ErrorCode::kInvalidArgument, "unknown kernel kind '" + name + "'");
}

EndmemberSampling parse_endmember_sampling(const std::string& name) {
  if (name == "uniform") return EndmemberSampling::kUniform;
  if (name == "planted") return EndmemberSampling::kPlanted;
  fail(ErrorCode::kInvalidArgument, "unknown endmember sampling '" + name + "'");
}

}  // namespace cosmf
