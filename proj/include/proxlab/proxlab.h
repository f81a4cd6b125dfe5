// ----------------------------------------------------------------------------
// Copyright 2026 The ProxLab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ----------------------------------------------------------------------------
#ifndef PROXLAB_PROXLAB_H
#define PROXLAB_PROXLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(PROXLAB_BUILDING_LIBRARY)
#define PROXLAB_API __attribute__((visibility("default")))
#else
#define PROXLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure a message describing the
 * last error of the calling thread is available from proxlab_last_error(). */
typedef enum proxlab_status {
  PROXLAB_OK = 0,
  PROXLAB_INVALID_ARGUMENT = 1,
  PROXLAB_INVALID_STATE = 2,
  PROXLAB_NUMERIC_OVERFLOW = 3,
  PROXLAB_DOMAIN_ERROR = 4,
  PROXLAB_NUMERIC_ERROR = 5,
  PROXLAB_PARSE_ERROR = 6,
  PROXLAB_IO_ERROR = 7,
  PROXLAB_INTERNAL = 8
} proxlab_status;

PROXLAB_API const char* proxlab_version(void);
PROXLAB_API const char* proxlab_status_name(proxlab_status status);
/* Empty string when the thread has not seen an error. */
PROXLAB_API const char* proxlab_last_error(void);

/* ---- training configuration ---- */

typedef struct proxlab_config proxlab_config;

PROXLAB_API proxlab_status proxlab_config_default(proxlab_config** out);
/* `key = value` text, one setting per line, '#' starts a comment. */
PROXLAB_API proxlab_status proxlab_config_parse(const char* text, proxlab_config** out);
PROXLAB_API proxlab_status proxlab_config_load(const char* path, proxlab_config** out);
PROXLAB_API void proxlab_config_free(proxlab_config* config);

PROXLAB_API proxlab_status proxlab_config_set_seed(proxlab_config* config, uint64_t seed);
PROXLAB_API proxlab_status proxlab_config_seed(const proxlab_config* config, uint64_t* seed);
PROXLAB_API proxlab_status proxlab_config_epochs(const proxlab_config* config, size_t* epochs);
/* Copies the resolved config text (NUL-terminated) into buf. *needed always
 * receives the required size including the terminator; pass buf = NULL to
 * query it. A non-NULL buf that is too small gives PROXLAB_INVALID_ARGUMENT. */
PROXLAB_API proxlab_status proxlab_config_resolved(const proxlab_config* config, char* buf, size_t capacity,
                                                   size_t* needed);
PROXLAB_API proxlab_status proxlab_config_write_resolved(const proxlab_config* config, const char* path);

/* ---- training runs ---- */

typedef struct proxlab_epoch_metrics {
  size_t epoch;
  size_t timesteps;
  double mean_episode_reward;
  double clipfrac;
  double max_ratio;
  double max_kl;
  double mean_kl;
  double entropy;
  double unimproved_frac;
  double loss;
  double penalty_alpha;
} proxlab_epoch_metrics;

typedef struct proxlab_run proxlab_run;

/* The run keeps its own copy of the config. */
PROXLAB_API proxlab_status proxlab_run_create(const proxlab_config* config, proxlab_run** out);
PROXLAB_API void proxlab_run_free(proxlab_run* run);
/* One epoch. Returns PROXLAB_INVALID_STATE once every epoch has run. */
PROXLAB_API proxlab_status proxlab_run_step(proxlab_run* run, proxlab_epoch_metrics* metrics);
/* Steps until the configured number of epochs is reached. */
PROXLAB_API proxlab_status proxlab_run_finish(proxlab_run* run);
PROXLAB_API proxlab_status proxlab_run_epochs_done(const proxlab_run* run, size_t* epochs);
PROXLAB_API proxlab_status proxlab_run_metrics(const proxlab_run* run, size_t index, proxlab_epoch_metrics* metrics);
PROXLAB_API proxlab_status proxlab_run_write_csv(const proxlab_run* run, const char* path);

/* ---- objectives ---- */

typedef struct proxlab_objective_params {
  double epsilon;
  double delta;
  double alpha;
} proxlab_objective_params;

/* Per-sample surrogate of the named variant at ratio r, advantage A and
 * KL(old || new) kl. The PENALTY variant uses alpha as its live coefficient. */
PROXLAB_API proxlab_status proxlab_sample_objective(const char* variant, const proxlab_objective_params* params,
                                                    double r, double advantage, double kl, double* value);

/* ---- property checks ---- */

/* Runs every check and writes one line per check to report_path.
 * mutation: NULL or "none", "rollback_slope", "drop_min".
 * *failures receives the number of FAIL lines. */
PROXLAB_API proxlab_status proxlab_verify(const char* mutation, const char* report_path, size_t* failures);

#ifdef __cplusplus
}
#endif

#endif /* PROXLAB_PROXLAB_H */
