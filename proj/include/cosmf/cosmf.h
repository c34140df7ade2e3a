/*
 * Copyright 2026 The cosmf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the cosmf library.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function.  Accessors named *_endmembers, *_abundances, ...
 * return borrowed handles that live as long as their parent.  Strings
 * returned through char** out-parameters are heap allocated and released
 * with cosmf_string_free.  Matrix data crosses the boundary in row-major
 * order.
 *
 * Every fallible call returns a cosmf_status; on failure the message is
 * available from cosmf_last_error() on the calling thread until the next
 * failing call on that thread.  Out-parameters are left untouched on
 * failure. */

#ifndef COSMF_COSMF_H
#define COSMF_COSMF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(COSMF_BUILDING_LIBRARY)
#define COSMF_API __declspec(dllexport)
#else
#define COSMF_API __declspec(dllimport)
#endif
#else
#define COSMF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cosmf_status {
  COSMF_OK = 0,
  COSMF_E_INVALID_ARGUMENT = 1,
  COSMF_E_DIMENSION_MISMATCH = 2,
  COSMF_E_PARSE = 3,
  COSMF_E_IO = 4,
  COSMF_E_NUMERICAL = 5,
  COSMF_E_BUDGET_EXHAUSTED = 6,
  COSMF_E_INTERNAL = 99
} cosmf_status;

typedef struct cosmf_matrix cosmf_matrix;
typedef struct cosmf_spatial cosmf_spatial;
typedef struct cosmf_scene cosmf_scene;
typedef struct cosmf_solution cosmf_solution;

COSMF_API const char* cosmf_version(void);
COSMF_API const char* cosmf_last_error(void);
COSMF_API const char* cosmf_status_name(cosmf_status status);
COSMF_API void cosmf_string_free(char* s);

/* Matrices.  `data` may be NULL for a zero matrix. */
COSMF_API cosmf_status cosmf_matrix_create(size_t rows, size_t cols, const double* data, cosmf_matrix** out);
COSMF_API cosmf_status cosmf_matrix_read_csv(const char* path, cosmf_matrix** out);
COSMF_API cosmf_status cosmf_matrix_write_csv(const cosmf_matrix* m, const char* path);
COSMF_API size_t cosmf_matrix_rows(const cosmf_matrix* m);
COSMF_API size_t cosmf_matrix_cols(const cosmf_matrix* m);
COSMF_API cosmf_status cosmf_matrix_copy_data(const cosmf_matrix* m, double* out, size_t capacity);
COSMF_API void cosmf_matrix_free(cosmf_matrix* m);

/* Spatial response G (windows of SR pixels with weights). */
COSMF_API cosmf_status cosmf_spatial_read_json(const char* path, cosmf_spatial** out);
COSMF_API cosmf_status cosmf_spatial_from_json(const char* json, cosmf_spatial** out);
COSMF_API cosmf_status cosmf_spatial_write_json(const cosmf_spatial* g, const char* path);
/* Blur + downsample operator from a scene config JSON (keys width, height,
 * factor, kernel, kernel_size, kernel_variance). */
COSMF_API cosmf_status cosmf_spatial_build(const char* scene_config_json, cosmf_spatial** out);
COSMF_API size_t cosmf_spatial_sr_pixels(const cosmf_spatial* g);
COSMF_API size_t cosmf_spatial_hs_pixels(const cosmf_spatial* g);
COSMF_API void cosmf_spatial_free(cosmf_spatial* g);

/* Box-average spectral response F with `ms_bands` rows and `bands` columns. */
COSMF_API cosmf_status cosmf_spectral_build(size_t bands, size_t ms_bands, cosmf_matrix** out);

/* Model operations. */
COSMF_API cosmf_status cosmf_reconstruct(const cosmf_matrix* endmembers, const cosmf_matrix* abundances,
                                         cosmf_matrix** out);
COSMF_API cosmf_status cosmf_observe(const cosmf_matrix* image, const cosmf_matrix* spectral,
                                     const cosmf_spatial* spatial, cosmf_matrix** ms, cosmf_matrix** hs);
COSMF_API cosmf_status cosmf_add_noise(const cosmf_matrix* y, double snr_db, uint64_t seed, cosmf_matrix** out);
/* Succeeds for any well-formed input; the report's "valid" field tells
 * whether the model invariants hold. */
COSMF_API cosmf_status cosmf_validate_model(const cosmf_matrix* endmembers, const cosmf_matrix* abundances,
                                            const cosmf_matrix* spectral, const cosmf_spatial* spatial,
                                            char** report_json);
COSMF_API cosmf_status cosmf_objective(const cosmf_matrix* endmembers, const cosmf_matrix* abundances,
                                       const cosmf_matrix* ms, const cosmf_matrix* hs,
                                       const cosmf_matrix* spectral, const cosmf_spatial* spatial, double* out);

/* Synthetic scenes.  `config_json` may be NULL for defaults. */
COSMF_API cosmf_status cosmf_scene_generate(const char* config_json, cosmf_scene** out);
COSMF_API const cosmf_matrix* cosmf_scene_endmembers(const cosmf_scene* s);
COSMF_API const cosmf_matrix* cosmf_scene_abundances(const cosmf_scene* s);
COSMF_API const cosmf_matrix* cosmf_scene_image(const cosmf_scene* s);
COSMF_API const cosmf_matrix* cosmf_scene_spectral(const cosmf_scene* s);
COSMF_API const cosmf_spatial* cosmf_scene_spatial(const cosmf_scene* s);
COSMF_API cosmf_status cosmf_scene_metadata_json(const cosmf_scene* s, char** out);
COSMF_API void cosmf_scene_free(cosmf_scene* s);

/* Solver.  `config_json` may be NULL; initial guesses may be NULL. */
COSMF_API cosmf_status cosmf_solve(const cosmf_matrix* ms, const cosmf_matrix* hs, const cosmf_matrix* spectral,
                                   const cosmf_spatial* spatial, size_t endmembers, const char* config_json,
                                   const cosmf_matrix* initial_endmembers, const cosmf_matrix* initial_abundances,
                                   cosmf_solution** out);
COSMF_API const cosmf_matrix* cosmf_solution_endmembers(const cosmf_solution* s);
COSMF_API const cosmf_matrix* cosmf_solution_abundances(const cosmf_solution* s);
COSMF_API double cosmf_solution_objective(const cosmf_solution* s);
COSMF_API cosmf_status cosmf_solution_report_json(const cosmf_solution* s, char** out);
COSMF_API void cosmf_solution_free(cosmf_solution* s);

/* Recovery certificate for a ground-truth scene. */
COSMF_API cosmf_status cosmf_certify(const cosmf_matrix* endmembers, const cosmf_matrix* abundances,
                                     const cosmf_matrix* spectral, const cosmf_spatial* spatial, char** out);
/* Alignment of a recovered factorisation with the truth: R, its permuted
 * form, and the per-pixel abundance error inequality. */
COSMF_API cosmf_status cosmf_align(const cosmf_matrix* true_endmembers, const cosmf_matrix* true_abundances,
                                   const cosmf_matrix* endmembers, const cosmf_matrix* abundances,
                                   const cosmf_matrix* spectral, const cosmf_spatial* spatial, char** out);
COSMF_API cosmf_status cosmf_c_of(int n, int k, double* out);
COSMF_API cosmf_status cosmf_dominance_probability(int n, int m, int64_t trials, uint64_t seed, char** out);

/* Three-material non-identifiable instance with mixing parameter rho. */
COSMF_API cosmf_status cosmf_counterexample_instance(double rho, cosmf_matrix** endmembers,
                                                     cosmf_matrix** abundances, cosmf_matrix** spectral,
                                                     cosmf_spatial** spatial);
COSMF_API cosmf_status cosmf_counterexample(double rho, double alpha1, int grid_points, char** out);

/* SNR sweep.  Writes results.csv and summary.json when output_dir is
 * non-NULL (it overrides the config's output_dir). */
COSMF_API cosmf_status cosmf_experiment(const char* config_json, const char* output_dir, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* COSMF_COSMF_H */
