// Copyright 2026 The mcg Authors
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

/*
 * C interface to the multicolor cell-growth lattice model.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an mcg_status; on failure a description is
 * available from mcg_last_error() on the calling thread until the next call.
 */
#ifndef MCG_MCG_H
#define MCG_MCG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MCG_BUILDING_LIBRARY)
#    define MCG_API __declspec(dllexport)
#  else
#    define MCG_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__) || defined(__clang__)
#  define MCG_API __attribute__((visibility("default")))
#else
#  define MCG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcg_status {
  MCG_OK = 0,
  MCG_ERR_INVALID_ARGUMENT = 1,
  MCG_ERR_PARSE = 2,
  MCG_ERR_IO = 3,
  MCG_ERR_EXPLOSIVE = 4,
  MCG_ERR_NONCONVERGENCE = 5,
  MCG_ERR_RANK_DEFICIENT = 6,
  MCG_ERR_SINGULAR = 7,
  MCG_ERR_BOOTSTRAP = 8,
  MCG_ERR_INTERNAL = 99
} mcg_status;

typedef enum mcg_criterion { MCG_AIC = 0, MCG_BIC = 1 } mcg_criterion;

typedef struct mcg_counts mcg_counts;
typedef struct mcg_params mcg_params;
typedef struct mcg_fit mcg_fit;

MCG_API const char* mcg_version(void);
MCG_API const char* mcg_status_name(mcg_status status);
MCG_API const char* mcg_last_error(void);

/* Worker count used by bootstrap and Monte Carlo runs (MCG_THREADS). */
MCG_API int mcg_default_threads(void);

/* ---- counts ---------------------------------------------------------- */

MCG_API mcg_status mcg_counts_read_csv(const char* path, mcg_counts** out);
MCG_API mcg_status mcg_counts_write_csv(const mcg_counts* counts, const char* path);

/* bounds = {x_min, x_max, y_min, y_max}, or NULL for the bounding box. */
MCG_API mcg_status mcg_counts_tile_cells(const char* cells_csv_path, int n,
                                         const double* bounds, mcg_counts** out);

/* data holds (T + 1) * n_colors * n * n counts in (t, color, row, col) order. */
MCG_API mcg_status mcg_counts_create(int n, int T, int n_colors, const int64_t* data,
                                     mcg_counts** out);
MCG_API void mcg_counts_free(mcg_counts* counts);

MCG_API int mcg_counts_side(const mcg_counts* counts);
MCG_API int mcg_counts_T(const mcg_counts* counts);
MCG_API int mcg_counts_n_colors(const mcg_counts* counts);
MCG_API int64_t mcg_counts_get(const mcg_counts* counts, int t, int color, int row, int col);

/* ---- parameters and simulation --------------------------------------- */

MCG_API mcg_status mcg_params_read_json(const char* path, mcg_params** out);

/* beta and mask are n_colors x n_colors row-major; mask may be NULL. */
MCG_API mcg_status mcg_params_create(int n_colors, const double* alpha, const double* beta,
                                     const int* mask, mcg_params** out);
MCG_API void mcg_params_free(mcg_params* params);

MCG_API mcg_status mcg_simulate(const mcg_params* params, int n, int T, int64_t seed_count,
                                uint64_t rng, mcg_counts** out);

/* ---- fitting --------------------------------------------------------- */

/* Reads a mask document into mask_out (row-major, capacity entries). */
MCG_API mcg_status mcg_mask_read_json(const char* path, int* mask_out, size_t capacity,
                                      int* n_colors_out);

/* mask is n_colors x n_colors row-major, or NULL for the full model. */
MCG_API mcg_status mcg_fit_counts(const mcg_counts* counts, const int* mask, mcg_fit** out);
MCG_API mcg_status mcg_select(const mcg_counts* counts, mcg_criterion criterion,
                              mcg_fit** out);

/* Refits `counts` with the mask stored in a fit document and checks that the
 * estimates agree with the document. */
MCG_API mcg_status mcg_fit_load_json(const char* path, const mcg_counts* counts,
                                     mcg_fit** out);
MCG_API mcg_status mcg_fit_write_json(const mcg_fit* fit, double ci_level, const char* path);
MCG_API void mcg_fit_free(mcg_fit* fit);

MCG_API int mcg_fit_num_params(const mcg_fit* fit);
MCG_API mcg_status mcg_fit_estimates(const mcg_fit* fit, double* theta, double* se, size_t len);
MCG_API double mcg_fit_loglik(const mcg_fit* fit);
MCG_API double mcg_fit_aic(const mcg_fit* fit);
MCG_API double mcg_fit_bic(const mcg_fit* fit);

/* ---- bootstrap, prediction, goodness of fit -------------------------- */

MCG_API mcg_status mcg_bootstrap_write_json(const mcg_fit* fit, const mcg_counts* counts, int B,
                                            uint64_t rng, double ci_level, const char* path);

/* One-step-ahead QQ bands for each t in times; mask may be NULL. Writes a
 * CSV table and sets *all_covered when every band contains the identity. */
MCG_API mcg_status mcg_predict_qq_csv(const mcg_counts* counts, int window, const int* times,
                                      size_t n_times, double qq_offset, uint64_t rng,
                                      const int* mask, const char* path, int* all_covered);

MCG_API mcg_status mcg_gof_replicate(const mcg_fit* fit, const mcg_counts* counts,
                                     uint64_t rng, mcg_counts** out);

/* ---- Monte Carlo ----------------------------------------------------- */

typedef struct mcg_mc_options {
  int table;          /* 1, 2 or 3 */
  int model;          /* 1, 2 or 3 */
  int n;
  int T;
  int reps;
  uint64_t rng;
  int64_t seed_count; /* t=0 count per tile and color; default 10 */
  int bootstrap_B;    /* table 2 only; 0 disables bootstrap coverage */
  int threads;        /* 0 = mcg_default_threads() */
} mcg_mc_options;

MCG_API void mcg_mc_options_init(mcg_mc_options* options);
MCG_API mcg_status mcg_montecarlo_write_json(const mcg_mc_options* options, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* MCG_MCG_H */
