/*
 Copyright 2026 The phes Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

/* C interface of the phes library. Every function returns a phes_status;
 * on failure phes_last_error() describes the problem (thread local, valid
 * until the next call on the same thread). Strings returned through
 * `const char**` are owned by the handle and live until it is destroyed. */

#ifndef PHES_PHES_H
#define PHES_PHES_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PHES_API __declspec(dllexport)
#else
#define PHES_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum phes_status {
    PHES_OK = 0,
    PHES_ERR_INVALID_ARGUMENT = 1,
    PHES_ERR_PARSE = 2,
    PHES_ERR_INFEASIBLE = 3,
    PHES_ERR_NUMERIC = 4,
    PHES_ERR_IO = 5,
    PHES_ERR_INTERNAL = 6
} phes_status;

typedef struct phes_problem phes_problem;
typedef struct phes_certificate phes_certificate;
typedef struct phes_trajectory phes_trajectory;
typedef struct phes_tuning_report phes_tuning_report;

PHES_API const char* phes_last_error(void);
PHES_API const char* phes_version(void);
PHES_API const char* phes_status_name(phes_status status);

/* Problems ---------------------------------------------------------------
 * A problem bundles model, gains, region, integrator and output settings.
 * Setters reject out-of-range scalars immediately; consistency with the
 * model (vector sizes, scenario applicability) is checked when a
 * computation runs. */

/* model: pera | msd1 | pendulum | linear */
PHES_API phes_status phes_problem_create_builtin(const char* model, phes_problem** out);
PHES_API phes_status phes_problem_create_from_config(const char* path, phes_problem** out);
PHES_API phes_status phes_problem_create_from_config_text(const char* text, phes_problem** out);
PHES_API void phes_problem_destroy(phes_problem* problem);

/* PERA gain scenario: s1 | s2 | s3 (optionally prefixed with pera-). */
PHES_API phes_status phes_problem_set_scenario(phes_problem* problem, const char* name);
/* which: kp | ki | kd | q_star | q0 | p0. count 1 broadcasts. */
PHES_API phes_status phes_problem_set_vector(phes_problem* problem, const char* which,
                                             const double* values, size_t count);
PHES_API phes_status phes_problem_set_region(phes_problem* problem, double q_radius,
                                             double p_radius);
PHES_API phes_status phes_problem_set_seed(phes_problem* problem, uint64_t seed);
PHES_API phes_status phes_problem_set_extra_samples(phes_problem* problem, int count);
/* phi: at | ainv | A_transpose | A_inverse */
PHES_API phes_status phes_problem_set_phi(phes_problem* problem, const char* phi);
PHES_API phes_status phes_problem_set_integrator(phes_problem* problem, double step,
                                                 double horizon, size_t record_every);
PHES_API phes_status phes_problem_set_global(phes_problem* problem, int global_flag);
PHES_API phes_status phes_problem_set_canonical(phes_problem* problem, int canonical);

PHES_API phes_status phes_problem_dof(const phes_problem* problem, size_t* dof);
PHES_API phes_status phes_problem_model(const phes_problem* problem, const char** name);
PHES_API phes_status phes_problem_output_dir(const phes_problem* problem, const char** dir);
PHES_API phes_status phes_problem_canonical(const phes_problem* problem, int* canonical);
/* Newline-separated provenance lines (parameters, gains, seed, region). */
PHES_API phes_status phes_problem_comments(phes_problem* problem, const char** text);

/* Certificates ----------------------------------------------------------- */

/* PHES_ERR_INFEASIBLE when no certificate exists on the region. */
PHES_API phes_status phes_certify(phes_problem* problem, phes_certificate** out);
PHES_API void phes_certificate_destroy(phes_certificate* cert);
/* key: any numeric certificate key (epsilon, beta_min, beta_max, norm_A_max,
 * mu, k1, k2, rate_paper, rate_sound, samples, margin, epsilon_star). */
PHES_API phes_status phes_certificate_get(const phes_certificate* cert, const char* key,
                                          double* value);
/* Key-value text including provenance comments. */
PHES_API phes_status phes_certificate_text(const phes_certificate* cert, const char** text);
PHES_API phes_status phes_certificate_write(const phes_certificate* cert, const char* path);

/* Trajectories ----------------------------------------------------------- */

/* Closed-loop simulation from the problem's initial state; canonical != 0
 * integrates the transformed system in canonical coordinates. */
PHES_API phes_status phes_simulate(phes_problem* problem, int canonical, phes_trajectory** out);
PHES_API void phes_trajectory_destroy(phes_trajectory* traj);
PHES_API phes_status phes_trajectory_size(const phes_trajectory* traj, size_t* rows);
PHES_API phes_status phes_trajectory_write_csv(const phes_trajectory* traj, const char* path);
PHES_API phes_status phes_trajectory_decay_rate(const phes_trajectory* traj, double* rate);
/* ||q(T) - q_star|| in original coordinates. */
PHES_API phes_status phes_trajectory_final_error(const phes_trajectory* traj, double* error);
/* State at row `row` in original coordinates; q and p hold dof entries each. */
PHES_API phes_status phes_trajectory_state(const phes_trajectory* traj, size_t row, double* q,
                                           double* p);
PHES_API phes_status phes_trajectory_energy_audit(const phes_trajectory* traj, int* passed,
                                                  double* max_increase);

/* Tuning ----------------------------------------------------------------- */

/* PERA scenarios by name (s1, s2, s3) ranked by rate_paper. */
PHES_API phes_status phes_tune_sets(phes_problem* problem, const char* const* names,
                                    size_t count, phes_tuning_report** out);
/* grid: "default" (K_P in {0.5, 1, 2}, K_I in {2, 8}, K_D = 0 on every
 * actuated axis). PHES_ERR_INFEASIBLE when nothing certifies. */
PHES_API phes_status phes_tune_grid(phes_problem* problem, const char* grid, double target_rate,
                                    phes_tuning_report** out);
PHES_API void phes_tuning_report_destroy(phes_tuning_report* report);
PHES_API phes_status phes_tuning_report_size(const phes_tuning_report* report, size_t* count);
/* Label at rank `index` of the ordering. */
PHES_API phes_status phes_tuning_report_label(const phes_tuning_report* report, size_t index,
                                              const char** label);
/* Best grid candidate; PHES_ERR_INVALID_ARGUMENT for set reports. */
PHES_API phes_status phes_tuning_report_best(const phes_tuning_report* report,
                                             const char** label);
PHES_API phes_status phes_tuning_report_csv(const phes_tuning_report* report,
                                            const char** text);
PHES_API phes_status phes_tuning_report_write_csv(const phes_tuning_report* report,
                                                  const char* path);

#ifdef __cplusplus
}
#endif

#endif /* PHES_PHES_H */
