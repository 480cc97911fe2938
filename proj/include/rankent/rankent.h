/* Copyright (c) 2026 The rankent Authors
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

/* Public C surface of the rankent shared library.
 *
 * Every operation follows the same shape: it returns a rankent_status, and
 * on RANKENT_OK the output parameter holds a handle or a heap string the
 * caller must release (rankent_*_close / rankent_string_free).  On any
 * other status the output is untouched and rankent_last_error() carries a
 * human-readable message for the calling thread.
 *
 * Commands produce a rankent_result: one JSON document plus zero or more
 * named CSV tables.  The library never writes files and never touches the
 * network; persisting outputs is the caller's job.
 */

#ifndef RANKENT_RANKENT_H_
#define RANKENT_RANKENT_H_

#include <stdint.h>

#if defined(_WIN32)
#define RANKENT_API __declspec(dllexport)
#elif defined(__GNUC__)
#define RANKENT_API __attribute__((visibility("default")))
#else
#define RANKENT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rankent_status {
  RANKENT_OK = 0,
  RANKENT_E_INVALID_ARGUMENT = 1,
  RANKENT_E_DOMAIN = 2,       /* inputs outside a function's domain */
  RANKENT_E_PARSE = 3,        /* malformed input file */
  RANKENT_E_VALIDATION = 4,   /* well-formed file, bad content */
  RANKENT_E_NO_CONVERGENCE = 5,
  RANKENT_E_INFEASIBLE = 6,   /* no parameter value can satisfy the data */
  RANKENT_E_IO = 7,
  RANKENT_E_INTERNAL = 8
} rankent_status;

/* Terminal state of a fit carried by a result; failure states map onto
 * distinct process exit codes in the bundled CLI. */
typedef enum rankent_outcome {
  RANKENT_OUTCOME_OK = 0,
  RANKENT_OUTCOME_NOT_CONVERGED = 1,
  /* The consistency workflow ran out of exclusion budget without the
   * estimators agreeing; parameters of the closest state are reported. */
  RANKENT_OUTCOME_DECLARED_FAILURE = 2
} rankent_outcome;

typedef struct rankent_dataset rankent_dataset;
typedef struct rankent_result rankent_result;

/* Message describing the most recent failure on this thread.  The pointer
 * stays valid until the next failing call on the same thread. */
RANKENT_API const char* rankent_last_error(void);

RANKENT_API const char* rankent_version(void);

RANKENT_API void rankent_string_free(char* s);

/* ---- datasets ------------------------------------------------------- */

/* Reads a CSV panel: header `unit_id,year,population` with an optional
 * trailing `group` column; integer populations > 0; no duplicate
 * (unit, year) rows.  Parse errors carry line/column, validation errors
 * enumerate every offending row. */
RANKENT_API rankent_status rankent_dataset_open(const char* path,
                                                rankent_dataset** out);
RANKENT_API void rankent_dataset_close(rankent_dataset* ds);

/* JSON summary: record/unit/group/year counts and the content checksum. */
RANKENT_API rankent_status rankent_dataset_summary(const rankent_dataset* ds,
                                                   char** json_out);

RANKENT_API rankent_status rankent_dataset_group_count(
    const rankent_dataset* ds, int64_t* out);
/* Group name at `index` in sorted order; "" when the file has no groups. */
RANKENT_API rankent_status rankent_dataset_group_name(
    const rankent_dataset* ds, int64_t index, char** out);

/* ---- results -------------------------------------------------------- */

RANKENT_API void rankent_result_close(rankent_result* res);
RANKENT_API rankent_status rankent_result_document(const rankent_result* res,
                                                   char** json_out);
RANKENT_API rankent_status rankent_result_outcome(const rankent_result* res,
                                                  int* out);
RANKENT_API rankent_status rankent_result_table_count(
    const rankent_result* res, int64_t* out);
RANKENT_API rankent_status rankent_result_table_name(const rankent_result* res,
                                                     int64_t index, char** out);
RANKENT_API rankent_status rankent_result_table_csv(const rankent_result* res,
                                                    int64_t index, char** out);

/* ---- fitting -------------------------------------------------------- */

typedef enum rankent_fit_mode {
  RANKENT_FIT_Q1 = 0,          /* q = 1, lambda tied to the aggregate */
  RANKENT_FIT_Q = 1,           /* least squares over q, lambda, x0 */
  RANKENT_FIT_MOMENTS = 2,     /* logarithmic-moment system */
  RANKENT_FIT_CONSISTENCY = 3  /* cross-checked workflow with exclusions */
} rankent_fit_mode;

typedef struct rankent_fit_options {
  int mode;             /* rankent_fit_mode */
  double n_total;       /* q1 mode: external aggregate; 0 = sample sum */
  int fit_n;            /* q1 mode: estimate the aggregate as well */
  int with_drift;       /* q / moments modes: include lognormal drift */
  int exclude_head;     /* consistency mode: outsider caps */
  int exclude_tail;
  double agree_q;       /* consistency mode: agreement tolerances */
  double agree_log_lambda;
  int with_band;        /* attach a sampling band to the plot table */
  double band_level;    /* central coverage, in (0, 1) */
  int64_t replicas;     /* band replicas, >= 1000 */
  uint64_t seed;
} rankent_fit_options;

RANKENT_API void rankent_fit_options_init(rankent_fit_options* o);

/* Fits the (group, year) cross-section.  group = "" means the whole
 * panel; year = 0 means the group's latest year.  Tables: "plot" with
 * columns rank, observed, fitted, band_low, band_high. */
RANKENT_API rankent_status rankent_run_fit(const rankent_dataset* ds,
                                           const char* group, int64_t year,
                                           const rankent_fit_options* options,
                                           rankent_result** out);

/* Like rankent_run_fit but the table is "band": rank, observed, band_low,
 * band_high.  Fails with RANKENT_E_NO_CONVERGENCE when the underlying fit
 * does not converge. */
RANKENT_API rankent_status rankent_run_band(const rankent_dataset* ds,
                                            const char* group, int64_t year,
                                            const rankent_fit_options* options,
                                            rankent_result** out);

/* Per-group q=1 fits followed by the scale change x' = x lambda / x0,
 * r' = r Gamma(0, lambda) / n_c.  groups = NULL fits every group.
 * Tables: one "group:<name>" per group (rank, size, scaled_rank,
 * scaled_size) plus "master" with the analytic collapse curve. */
RANKENT_API rankent_status rankent_run_scale(const rankent_dataset* ds,
                                             const char* const* groups,
                                             int64_t n_groups, int64_t year,
                                             const rankent_fit_options* options,
                                             rankent_result** out);

/* ---- growth dynamics ------------------------------------------------ */

typedef struct rankent_dynamics_options {
  double delta_u;       /* log-size bin width */
  double min_bin_frac;  /* drop bins below this fraction of the largest */
  int weighted;         /* standard-error weighting of bin means */
} rankent_dynamics_options;

RANKENT_API void rankent_dynamics_options_init(rankent_dynamics_options* o);

/* Growth-rate fit udot = k1 + kq exp((q-1) u) over one group's panel.
 * Tables: "bins" with bin_center, mean_udot, std_udot, count. */
RANKENT_API rankent_status rankent_run_dynamics(
    const rankent_dataset* ds, const char* group,
    const rankent_dynamics_options* options, rankent_result** out);

typedef struct rankent_compare_options {
  int64_t year;  /* cross-section year for the maxent fits; 0 = latest */
  rankent_dynamics_options dynamics;
  double agree_q;
  double agree_log_lambda;
  int exclude_head;
  int exclude_tail;
} rankent_compare_options;

RANKENT_API void rankent_compare_options_init(rankent_compare_options* o);

/* Per-group comparison of the cross-section q against the dynamical q,
 * with a through-origin slope and Pearson R over the well-defined rows.
 * Table: "comparison". */
RANKENT_API rankent_status rankent_run_compare_q(
    const rankent_dataset* ds, const rankent_compare_options* options,
    rankent_result** out);

/* ---- simulation ----------------------------------------------------- */

typedef enum rankent_init_law {
  RANKENT_INIT_FIXED = 0,
  RANKENT_INIT_LOG_UNIFORM = 1,
  RANKENT_INIT_EQUILIBRIUM = 2  /* draw from a rank-size model */
} rankent_init_law;

typedef struct rankent_sim_options {
  int64_t n_units;
  double q;
  double k1_mean, k1_std;
  double kq_mean, kq_std;
  int finite_size_noise;  /* sqrt(x)-scaled demographic term */
  int rates_per_unit;     /* redraw rates per unit instead of per step */
  double dt;              /* 1/dt must be a whole number of steps */
  int64_t steps;
  int64_t year0;
  double ceiling;         /* abort when any unit grows past this */
  int init_kind;          /* rankent_init_law */
  double init_value;      /* fixed */
  double init_lo, init_hi;  /* log_uniform */
  double init_q, init_lambda, init_x0, init_sigma;  /* equilibrium */
  uint64_t seed;
} rankent_sim_options;

RANKENT_API void rankent_sim_options_init(rankent_sim_options* o);

/* Simulates the growth model and returns the panel as table "panel" in
 * exactly the CSV layout rankent_dataset_open reads back. */
RANKENT_API rankent_status rankent_simulate(const rankent_sim_options* options,
                                            rankent_result** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RANKENT_RANKENT_H_ */
