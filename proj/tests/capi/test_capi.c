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
/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "proxlab/proxlab.h"

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static void config_basics(void) {
  proxlab_config* cfg = NULL;
  size_t epochs = 0, needed = 0;
  uint64_t seed = 1;
  char small[4];

  CHECK(proxlab_config_default(&cfg) == PROXLAB_OK);
  CHECK(proxlab_config_epochs(cfg, &epochs) == PROXLAB_OK && epochs == 100);
  CHECK(proxlab_config_seed(cfg, &seed) == PROXLAB_OK && seed == 0);
  CHECK(proxlab_config_set_seed(cfg, 42) == PROXLAB_OK);
  CHECK(proxlab_config_seed(cfg, &seed) == PROXLAB_OK && seed == 42);

  CHECK(proxlab_config_resolved(cfg, NULL, 0, &needed) == PROXLAB_OK);
  CHECK(needed > sizeof small);
  CHECK(proxlab_config_resolved(cfg, small, sizeof small, &needed) == PROXLAB_INVALID_ARGUMENT);
  {
    char big[4096];
    CHECK(needed <= sizeof big);
    CHECK(proxlab_config_resolved(cfg, big, sizeof big, &needed) == PROXLAB_OK);
    CHECK(strlen(big) + 1 == needed);
    CHECK(strstr(big, "seed = 42") != NULL);
  }
  proxlab_config_free(cfg);
  proxlab_config_free(NULL);
}

static void config_errors(void) {
  proxlab_config* cfg = NULL;
  CHECK(proxlab_config_parse("epsilon = 1.5\n", &cfg) == PROXLAB_PARSE_ERROR);
  CHECK(cfg == NULL);
  CHECK(strstr(proxlab_last_error(), "line 1") != NULL);
  CHECK(proxlab_config_parse("variant = truly\n", NULL) == PROXLAB_INVALID_ARGUMENT);
  CHECK(proxlab_config_load("/nonexistent/proxlab.cfg", &cfg) != PROXLAB_OK);
  CHECK(strcmp(proxlab_status_name(PROXLAB_PARSE_ERROR), proxlab_status_name(PROXLAB_OK)) != 0);
  CHECK(strlen(proxlab_version()) > 0);
}

static int same_metrics(const proxlab_epoch_metrics* a, const proxlab_epoch_metrics* b) {
  return a->epoch == b->epoch && a->timesteps == b->timesteps && a->mean_episode_reward == b->mean_episode_reward &&
         a->clipfrac == b->clipfrac && a->max_kl == b->max_kl && a->loss == b->loss && a->entropy == b->entropy;
}

static void runs(void) {
  const char* text = "variant = truly\ntotal_timesteps = 512\ntimesteps_per_epoch = 256\nhidden = 8\nseed = 3\n";
  proxlab_config* cfg = NULL;
  proxlab_run* a = NULL;
  proxlab_run* b = NULL;
  proxlab_epoch_metrics m0, m1, tmp;
  size_t done = 0;

  CHECK(proxlab_config_parse(text, &cfg) == PROXLAB_OK);
  CHECK(proxlab_run_create(cfg, &a) == PROXLAB_OK);
  CHECK(proxlab_run_create(cfg, &b) == PROXLAB_OK);
  proxlab_config_free(cfg); /* runs keep their own copy */

  CHECK(proxlab_run_step(a, &m0) == PROXLAB_OK && m0.epoch == 0 && m0.timesteps == 256);
  CHECK(proxlab_run_step(a, &m1) == PROXLAB_OK && m1.epoch == 1 && m1.timesteps == 512);
  CHECK(proxlab_run_step(a, &tmp) == PROXLAB_INVALID_STATE);
  CHECK(proxlab_run_epochs_done(a, &done) == PROXLAB_OK && done == 2);
  CHECK(isfinite(m1.loss) && m1.clipfrac >= 0.0 && m1.clipfrac <= 1.0);

  CHECK(proxlab_run_finish(b) == PROXLAB_OK);
  CHECK(proxlab_run_metrics(b, 0, &tmp) == PROXLAB_OK && same_metrics(&tmp, &m0));
  CHECK(proxlab_run_metrics(b, 1, &tmp) == PROXLAB_OK && same_metrics(&tmp, &m1));
  CHECK(proxlab_run_metrics(b, 2, &tmp) == PROXLAB_INVALID_ARGUMENT);
  CHECK(proxlab_run_write_csv(b, "/nonexistent/dir/metrics.csv") == PROXLAB_IO_ERROR);

  proxlab_run_free(a);
  proxlab_run_free(b);
}

static void objectives(void) {
  proxlab_objective_params p = {0.2, 0.03, 0.3};
  double v = 0.0;
  CHECK(proxlab_sample_objective("clip", &p, 1.5, 1.0, 0.0, &v) == PROXLAB_OK && fabs(v - 1.2) < 1e-15);
  CHECK(proxlab_sample_objective("rb", &p, 1.5, 1.0, 0.0, &v) == PROXLAB_OK && fabs(v - (1.2 - 0.3 * 0.3)) < 1e-15);
  CHECK(proxlab_sample_objective("pg", &p, 0.5, -2.0, 0.0, &v) == PROXLAB_OK && v == -1.0);
  CHECK(proxlab_sample_objective("sgd", &p, 1.0, 1.0, 0.0, &v) == PROXLAB_INVALID_ARGUMENT);
  CHECK(strstr(proxlab_last_error(), "sgd") != NULL);
  p.epsilon = 2.0;
  CHECK(proxlab_sample_objective("clip", &p, 1.0, 1.0, 0.0, &v) == PROXLAB_INVALID_ARGUMENT);
  CHECK(proxlab_sample_objective("clip", NULL, 1.0, 1.0, 0.0, &v) == PROXLAB_INVALID_ARGUMENT);
}

int main(void) {
  config_basics();
  config_errors();
  runs();
  objectives();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("c api checks passed\n");
  return 0;
}
