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

#include "cosmf/cosmf.h"

#include "cosmf/bounds.hpp"
#include "cosmf/counterexample.hpp"
#include "cosmf/error.hpp"
#include "cosmf/experiment.hpp"
#include "cosmf/io.hpp"
#include "cosmf/model.hpp"
#include "cosmf/scenegen.hpp"
#include "cosmf/solver.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

struct cosmf_matrix {
  cosmf::Matrix m;
};

struct cosmf_spatial {
  cosmf::SpatialResponse g;
};

struct cosmf_scene {
  cosmf_matrix endmembers;
  cosmf_matrix abundances;
  cosmf_matrix image;
  cosmf_matrix spectral;
  cosmf_spatial spatial;
  cosmf::Json metadata;
};

struct cosmf_solution {
  cosmf_matrix endmembers;
  cosmf_matrix abundances;
  cosmf::Solution solution;
};

namespace {

thread_local std::string g_last_error;

cosmf_status status_of(cosmf::ErrorCode code) {
  switch (code) {
    case cosmf::ErrorCode::kInvalidArgument: return COSMF_E_INVALID_ARGUMENT;
    case cosmf::ErrorCode::kDimensionMismatch: return COSMF_E_DIMENSION_MISMATCH;
    case cosmf::ErrorCode::kParse: return COSMF_E_PARSE;
    case cosmf::ErrorCode::kIo: return COSMF_E_IO;
    case cosmf::ErrorCode::kNumerical: return COSMF_E_NUMERICAL;
    case cosmf::ErrorCode::kBudgetExhausted: return COSMF_E_BUDGET_EXHAUSTED;
  }
  return COSMF_E_INTERNAL;
}

template <class F>
cosmf_status guard(F&& body) {
  try {
    body();
    return COSMF_OK;
  } catch (const cosmf::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return COSMF_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return COSMF_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return COSMF_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  cosmf::require(p != nullptr, cosmf::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(const cosmf::Json& j, char** out) { *out = dup_string(j.dump(2)); }

cosmf::Json parse_optional(const char* json, const char* what) {
  if (json == nullptr) return cosmf::Json::object();
  return cosmf::parse_json(json, what);
}

}  // namespace

extern "C" {

const char* cosmf_version(void) { return "0.1.0"; }

const char* cosmf_last_error(void) { return g_last_error.c_str(); }

const char* cosmf_status_name(cosmf_status status) {
  switch (status) {
    case COSMF_OK: return "ok";
    case COSMF_E_INVALID_ARGUMENT: return "invalid argument";
    case COSMF_E_DIMENSION_MISMATCH: return "dimension mismatch";
    case COSMF_E_PARSE: return "parse error";
    case COSMF_E_IO: return "i/o error";
    case COSMF_E_NUMERICAL: return "numerical failure";
    case COSMF_E_BUDGET_EXHAUSTED: return "budget exhausted";
    case COSMF_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void cosmf_string_free(char* s) { std::free(s); }

cosmf_status cosmf_matrix_create(size_t rows, size_t cols, const double* data, cosmf_matrix** out) {
  return guard([&] {
    need(out, "out");
    cosmf::require(rows > 0 && cols > 0, cosmf::ErrorCode::kInvalidArgument, "matrix dimensions must be positive");
    auto* m = new cosmf_matrix{cosmf::Matrix::Zero(static_cast<cosmf::Index>(rows), static_cast<cosmf::Index>(cols))};
    if (data != nullptr)
      for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
          m->m(static_cast<cosmf::Index>(r), static_cast<cosmf::Index>(c)) = data[r * cols + c];
    *out = m;
  });
}

cosmf_status cosmf_matrix_read_csv(const char* path, cosmf_matrix** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new cosmf_matrix{cosmf::read_matrix(path)};
  });
}

cosmf_status cosmf_matrix_write_csv(const cosmf_matrix* m, const char* path) {
  return guard([&] {
    need(m, "matrix");
    need(path, "path");
    cosmf::write_matrix(m->m, path);
  });
}

size_t cosmf_matrix_rows(const cosmf_matrix* m) { return m == nullptr ? 0 : static_cast<size_t>(m->m.rows()); }

size_t cosmf_matrix_cols(const cosmf_matrix* m) { return m == nullptr ? 0 : static_cast<size_t>(m->m.cols()); }

cosmf_status cosmf_matrix_copy_data(const cosmf_matrix* m, double* out, size_t capacity) {
  return guard([&] {
    need(m, "matrix");
    need(out, "out");
    const auto rows = static_cast<size_t>(m->m.rows());
    const auto cols = static_cast<size_t>(m->m.cols());
    cosmf::require(capacity >= rows * cols, cosmf::ErrorCode::kInvalidArgument,
                   "buffer holds " + std::to_string(capacity) + " values, need " + std::to_string(rows * cols));
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < cols; ++c)
        out[r * cols + c] = m->m(static_cast<cosmf::Index>(r), static_cast<cosmf::Index>(c));
  });
}

void cosmf_matrix_free(cosmf_matrix* m) { delete m; }

cosmf_status cosmf_spatial_read_json(const char* path, cosmf_spatial** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new cosmf_spatial{cosmf::read_spatial(path)};
  });
}

cosmf_status cosmf_spatial_from_json(const char* json, cosmf_spatial** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new cosmf_spatial{cosmf::spatial_from_json(cosmf::parse_json(json, "spatial response"))};
  });
}

cosmf_status cosmf_spatial_write_json(const cosmf_spatial* g, const char* path) {
  return guard([&] {
    need(g, "spatial");
    need(path, "path");
    cosmf::write_spatial(g->g, path);
  });
}

cosmf_status cosmf_spatial_build(const char* scene_config_json, cosmf_spatial** out) {
  return guard([&] {
    need(out, "out");
    const cosmf::SceneConfig config =
        cosmf::scene_config_from_json(parse_optional(scene_config_json, "scene config"));
    *out = new cosmf_spatial{cosmf::build_spatial_response(config)};
  });
}

size_t cosmf_spatial_sr_pixels(const cosmf_spatial* g) {
  return g == nullptr ? 0 : static_cast<size_t>(g->g.sr_pixels());
}

size_t cosmf_spatial_hs_pixels(const cosmf_spatial* g) {
  return g == nullptr ? 0 : static_cast<size_t>(g->g.hs_pixels());
}

void cosmf_spatial_free(cosmf_spatial* g) { delete g; }

cosmf_status cosmf_spectral_build(size_t bands, size_t ms_bands, cosmf_matrix** out) {
  return guard([&] {
    need(out, "out");
    *out = new cosmf_matrix{
        cosmf::build_spectral_response(static_cast<cosmf::Index>(bands), static_cast<cosmf::Index>(ms_bands))};
  });
}

cosmf_status cosmf_reconstruct(const cosmf_matrix* endmembers, const cosmf_matrix* abundances, cosmf_matrix** out) {
  return guard([&] {
    need(endmembers, "endmembers");
    need(abundances, "abundances");
    need(out, "out");
    *out = new cosmf_matrix{cosmf::reconstruct(endmembers->m, abundances->m)};
  });
}

cosmf_status cosmf_observe(const cosmf_matrix* image, const cosmf_matrix* spectral, const cosmf_spatial* spatial,
                           cosmf_matrix** ms, cosmf_matrix** hs) {
  return guard([&] {
    need(image, "image");
    need(spectral, "spectral");
    need(spatial, "spatial");
    need(ms, "ms");
    need(hs, "hs");
    cosmf::ObservedPair y = cosmf::observe(image->m, spectral->m, spatial->g);
    auto* a = new cosmf_matrix{std::move(y.ms)};
    *hs = new cosmf_matrix{std::move(y.hs)};
    *ms = a;
  });
}

cosmf_status cosmf_add_noise(const cosmf_matrix* y, double snr_db, uint64_t seed, cosmf_matrix** out) {
  return guard([&] {
    need(y, "y");
    need(out, "out");
    *out = new cosmf_matrix{cosmf::add_noise(y->m, snr_db, seed)};
  });
}

cosmf_status cosmf_validate_model(const cosmf_matrix* endmembers, const cosmf_matrix* abundances,
                                  const cosmf_matrix* spectral, const cosmf_spatial* spatial, char** report_json) {
  return guard([&] {
    need(endmembers, "endmembers");
    need(abundances, "abundances");
    need(spectral, "spectral");
    need(spatial, "spatial");
    need(report_json, "out");
    emit(cosmf::to_json(cosmf::validate_model(endmembers->m, abundances->m, spectral->m, spatial->g)), report_json);
  });
}

cosmf_status cosmf_objective(const cosmf_matrix* endmembers, const cosmf_matrix* abundances, const cosmf_matrix* ms,
                             const cosmf_matrix* hs, const cosmf_matrix* spectral, const cosmf_spatial* spatial,
                             double* out) {
  return guard([&] {
    need(endmembers, "endmembers");
    need(abundances, "abundances");
    need(ms, "ms");
    need(hs, "hs");
    need(spectral, "spectral");
    need(spatial, "spatial");
    need(out, "out");
    const cosmf::Problem problem{ms->m, hs->m, spectral->m, spatial->g};
    *out = cosmf::objective(endmembers->m, abundances->m, problem);
  });
}

cosmf_status cosmf_scene_generate(const char* config_json, cosmf_scene** out) {
  return guard([&] {
    need(out, "out");
    const cosmf::SceneConfig config = cosmf::scene_config_from_json(parse_optional(config_json, "scene config"));
    config.validate();
    cosmf::Matrix spectral = cosmf::build_spectral_response(config.bands, config.ms_bands);
    cosmf::SpatialResponse spatial = cosmf::build_spatial_response(config);
    cosmf::GeneratedScene g = cosmf::generate_scene(config, spectral, spatial);
    cosmf::Json meta = cosmf::scene_sidecar(g, config);
    *out = new cosmf_scene{{std::move(g.scene.endmembers)},
                           {std::move(g.scene.abundances)},
                           {std::move(g.scene.image)},
                           {std::move(spectral)},
                           {std::move(spatial)},
                           std::move(meta)};
  });
}

const cosmf_matrix* cosmf_scene_endmembers(const cosmf_scene* s) { return s == nullptr ? nullptr : &s->endmembers; }
const cosmf_matrix* cosmf_scene_abundances(const cosmf_scene* s) { return s == nullptr ? nullptr : &s->abundances; }
const cosmf_matrix* cosmf_scene_image(const cosmf_scene* s) { return s == nullptr ? nullptr : &s->image; }
const cosmf_matrix* cosmf_scene_spectral(const cosmf_scene* s) { return s == nullptr ? nullptr : &s->spectral; }
const cosmf_spatial* cosmf_scene_spatial(const cosmf_scene* s) { return s == nullptr ? nullptr : &s->spatial; }

cosmf_status cosmf_scene_metadata_json(const cosmf_scene* s, char** out) {
  return guard([&] {
    need(s, "scene");
    need(out, "out");
    emit(s->metadata, out);
  });
}

void cosmf_scene_free(cosmf_scene* s) { delete s; }

cosmf_status cosmf_solve(const cosmf_matrix* ms, const cosmf_matrix* hs, const cosmf_matrix* spectral,
                         const cosmf_spatial* spatial, size_t endmembers, const char* config_json,
                         const cosmf_matrix* initial_endmembers, const cosmf_matrix* initial_abundances,
                         cosmf_solution** out) {
  return guard([&] {
    need(ms, "ms");
    need(hs, "hs");
    need(spectral, "spectral");
    need(spatial, "spatial");
    need(out, "out");
    const cosmf::SolverConfig config = cosmf::solver_config_from_json(parse_optional(config_json, "solver config"));
    cosmf::InitialGuess guess;
    if (initial_endmembers != nullptr) guess.endmembers = initial_endmembers->m;
    if (initial_abundances != nullptr) guess.abundances = initial_abundances->m;
    const cosmf::Problem problem{ms->m, hs->m, spectral->m, spatial->g};
    cosmf::Solution sol = cosmf::solve_cosmf(problem, static_cast<cosmf::Index>(endmembers), config, guess);
    auto* s = new cosmf_solution{{sol.endmembers}, {sol.abundances}, std::move(sol)};
    *out = s;
  });
}

const cosmf_matrix* cosmf_solution_endmembers(const cosmf_solution* s) {
  return s == nullptr ? nullptr : &s->endmembers;
}

const cosmf_matrix* cosmf_solution_abundances(const cosmf_solution* s) {
  return s == nullptr ? nullptr : &s->abundances;
}

double cosmf_solution_objective(const cosmf_solution* s) { return s == nullptr ? 0.0 : s->solution.objective(); }

cosmf_status cosmf_solution_report_json(const cosmf_solution* s, char** out) {
  return guard([&] {
    need(s, "solution");
    need(out, "out");
    emit(cosmf::to_json(s->solution), out);
  });
}

void cosmf_solution_free(cosmf_solution* s) { delete s; }

cosmf_status cosmf_certify(const cosmf_matrix* endmembers, const cosmf_matrix* abundances,
                           const cosmf_matrix* spectral, const cosmf_spatial* spatial, char** out) {
  return guard([&] {
    need(endmembers, "endmembers");
    need(abundances, "abundances");
    need(spectral, "spectral");
    need(spatial, "spatial");
    need(out, "out");
    emit(cosmf::to_json(cosmf::certify(endmembers->m, abundances->m, spectral->m, spatial->g)), out);
  });
}

cosmf_status cosmf_align(const cosmf_matrix* true_endmembers, const cosmf_matrix* true_abundances,
                         const cosmf_matrix* endmembers, const cosmf_matrix* abundances,
                         const cosmf_matrix* spectral, const cosmf_spatial* spatial, char** out) {
  return guard([&] {
    need(true_endmembers, "true endmembers");
    need(true_abundances, "true abundances");
    need(endmembers, "endmembers");
    need(abundances, "abundances");
    need(spectral, "spectral");
    need(spatial, "spatial");
    need(out, "out");
    const cosmf::Certificate cert =
        cosmf::certify(true_endmembers->m, true_abundances->m, spectral->m, spatial->g);
    const cosmf::AlignmentReport alignment = cosmf::extract_alignment(
        true_endmembers->m, endmembers->m, cosmf::decimate_abundances(true_abundances->m, spatial->g),
        cosmf::decimate_abundances(abundances->m, spatial->g), cert.kruskal_rank, cert.epsilon);
    const cosmf::AbundanceErrorReport abundance = cosmf::verify_abundance_error(
        true_endmembers->m, true_abundances->m, endmembers->m, abundances->m, alignment, cert);
    emit({{"K", cert.kruskal_rank},
          {"epsilon", cosmf::json_real(cert.epsilon)},
          {"kappa", cosmf::json_real(cert.kappa)},
          {"C", cosmf::json_real(cert.c)},
          {"guarantee_applies", cert.guarantee_applies()},
          {"alignment", cosmf::to_json(alignment)},
          {"abundance_error", cosmf::to_json(abundance)}},
         out);
  });
}

cosmf_status cosmf_c_of(int n, int k, double* out) {
  return guard([&] {
    need(out, "out");
    *out = cosmf::c_of(n, k);
  });
}

cosmf_status cosmf_dominance_probability(int n, int m, int64_t trials, uint64_t seed, char** out) {
  return guard([&] {
    need(out, "out");
    cosmf::Json j;
    if (trials > 0) {
      j = cosmf::to_json(cosmf::dominance_monte_carlo(n, m, trials, seed));
    } else {
      j = {{"analytic", cosmf::dominance_probability(n, m)}, {"analytic_raw", cosmf::dominance_probability_raw(n, m)}};
    }
    j["N"] = n;
    j["M"] = m;
    j["seed"] = seed;
    emit(j, out);
  });
}

cosmf_status cosmf_counterexample_instance(double rho, cosmf_matrix** endmembers, cosmf_matrix** abundances,
                                           cosmf_matrix** spectral, cosmf_spatial** spatial) {
  return guard([&] {
    need(endmembers, "endmembers");
    need(abundances, "abundances");
    need(spectral, "spectral");
    need(spatial, "spatial");
    cosmf::CounterexampleInstance inst = cosmf::build_counterexample(rho);
    auto* a = new cosmf_matrix{std::move(inst.endmembers)};
    auto* s = new cosmf_matrix{std::move(inst.abundances)};
    auto* f = new cosmf_matrix{std::move(inst.spectral)};
    *spatial = new cosmf_spatial{std::move(inst.spatial)};
    *endmembers = a;
    *abundances = s;
    *spectral = f;
  });
}

cosmf_status cosmf_counterexample(double rho, double alpha1, int grid_points, char** out) {
  return guard([&] {
    need(out, "out");
    const cosmf::CounterexampleInstance inst = cosmf::build_counterexample(rho);
    emit(cosmf::to_json(cosmf::verify_counterexample(inst, alpha1, grid_points)), out);
  });
}

cosmf_status cosmf_experiment(const char* config_json, const char* output_dir, char** summary_json) {
  return guard([&] {
    need(summary_json, "out");
    cosmf::ExperimentConfig config =
        cosmf::experiment_config_from_json(parse_optional(config_json, "experiment config"));
    if (output_dir != nullptr) config.output_dir = output_dir;
    const cosmf::ExperimentResult result =
        config.output_dir.empty() ? cosmf::run_experiment(config) : cosmf::run_experiment_to_disk(config);
    cosmf::Json summary = result.summary();
    summary["config"] = cosmf::to_json(config);
    emit(summary, summary_json);
  });
}

}  // extern "C"
