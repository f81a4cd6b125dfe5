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
#include "proxlab/proxlab.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/metrics_io.hpp"
#include "core/objectives.hpp"
#include "core/trainer.hpp"
#include "core/verify.hpp"

struct proxlab_config {
  proxlab::TrainConfig config;
};

struct proxlab_run {
  explicit proxlab_run(const proxlab::TrainConfig& c) : trainer(c) {}
  proxlab::Trainer trainer;
};

namespace {

thread_local std::string g_last_error;

proxlab_status set_error(proxlab_status s, const char* what) {
  g_last_error = what;
  return s;
}

template <class F>
proxlab_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return PROXLAB_OK;
  } catch (const proxlab::Error& e) {
    return set_error(static_cast<proxlab_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PROXLAB_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PROXLAB_INTERNAL, e.what());
  } catch (...) {
    return set_error(PROXLAB_INTERNAL, "unknown exception");
  }
}

void need(const void* p, const char* what) {
  if (!p) proxlab::fail(proxlab::ErrorCode::invalid_argument, std::string(what) + " is null");
}

proxlab_epoch_metrics to_c(const proxlab::EpochMetrics& m) {
  return {m.epoch,   m.timesteps, m.mean_episode_reward, m.clipfrac,        m.max_ratio,    m.max_kl,
          m.mean_kl, m.entropy,   m.unimproved_frac,     m.loss,            m.penalty_alpha};
}

}  // namespace

extern "C" {

const char* proxlab_version(void) { return "0.1.0"; }

const char* proxlab_status_name(proxlab_status status) {
  if (status == PROXLAB_OK) return "ok";
  if (status < PROXLAB_INVALID_ARGUMENT || status > PROXLAB_INTERNAL) return "unknown";
  return proxlab::to_string(static_cast<proxlab::ErrorCode>(status));
}

const char* proxlab_last_error(void) { return g_last_error.c_str(); }

proxlab_status proxlab_config_default(proxlab_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new proxlab_config{};
  });
}

proxlab_status proxlab_config_parse(const char* text, proxlab_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new proxlab_config{proxlab::parse_config_text(text)};
  });
}

proxlab_status proxlab_config_load(const char* path, proxlab_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new proxlab_config{proxlab::parse_config(path)};
  });
}

void proxlab_config_free(proxlab_config* config) { delete config; }

proxlab_status proxlab_config_set_seed(proxlab_config* config, uint64_t seed) {
  return guarded([&] {
    need(config, "config");
    config->config.seed = seed;
  });
}

proxlab_status proxlab_config_seed(const proxlab_config* config, uint64_t* seed) {
  return guarded([&] {
    need(config, "config");
    need(seed, "seed");
    *seed = config->config.seed;
  });
}

proxlab_status proxlab_config_epochs(const proxlab_config* config, size_t* epochs) {
  return guarded([&] {
    need(config, "config");
    need(epochs, "epochs");
    *epochs = config->config.epochs();
  });
}

proxlab_status proxlab_config_resolved(const proxlab_config* config, char* buf, size_t capacity, size_t* needed) {
  return guarded([&] {
    need(config, "config");
    need(needed, "needed");
    const std::string text = proxlab::resolved_config_text(config->config);
    *needed = text.size() + 1;
    if (buf && capacity >= text.size() + 1) std::memcpy(buf, text.c_str(), text.size() + 1);
    else if (buf) proxlab::fail(proxlab::ErrorCode::invalid_argument, "buffer too small for resolved config");
  });
}

proxlab_status proxlab_config_write_resolved(const proxlab_config* config, const char* path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    proxlab::write_text_file(path, proxlab::resolved_config_text(config->config));
  });
}

proxlab_status proxlab_run_create(const proxlab_config* config, proxlab_run** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = new proxlab_run(config->config);
  });
}

void proxlab_run_free(proxlab_run* run) { delete run; }

proxlab_status proxlab_run_step(proxlab_run* run, proxlab_epoch_metrics* metrics) {
  return guarded([&] {
    need(run, "run");
    if (run->trainer.finished()) proxlab::fail(proxlab::ErrorCode::invalid_state, "run already finished");
    const auto m = run->trainer.step();
    if (metrics) *metrics = to_c(m);
  });
}

proxlab_status proxlab_run_finish(proxlab_run* run) {
  return guarded([&] {
    need(run, "run");
    run->trainer.run();
  });
}

proxlab_status proxlab_run_epochs_done(const proxlab_run* run, size_t* epochs) {
  return guarded([&] {
    need(run, "run");
    need(epochs, "epochs");
    *epochs = run->trainer.history().size();
  });
}

proxlab_status proxlab_run_metrics(const proxlab_run* run, size_t index, proxlab_epoch_metrics* metrics) {
  return guarded([&] {
    need(run, "run");
    need(metrics, "metrics");
    const auto& h = run->trainer.history();
    if (index >= h.size()) proxlab::fail(proxlab::ErrorCode::invalid_argument, "epoch index out of range");
    *metrics = to_c(h[index]);
  });
}

proxlab_status proxlab_run_write_csv(const proxlab_run* run, const char* path) {
  return guarded([&] {
    need(run, "run");
    need(path, "path");
    proxlab::write_text_file(path, proxlab::metrics_csv(run->trainer.history()));
  });
}

proxlab_status proxlab_sample_objective(const char* variant, const proxlab_objective_params* params, double r,
                                        double advantage, double kl, double* value) {
  return guarded([&] {
    need(variant, "variant");
    need(params, "params");
    need(value, "value");
    const auto v = proxlab::parse_variant(variant);
    if (!v) proxlab::fail(proxlab::ErrorCode::invalid_argument, std::string("unknown variant: ") + variant);
    proxlab::ObjectiveConfig c;
    c.variant = *v;
    c.epsilon = params->epsilon;
    c.delta = params->delta;
    c.alpha = params->alpha;
    c.validate();
    *value = proxlab::sample_objective(c, r, advantage, kl, params->alpha);
  });
}

proxlab_status proxlab_verify(const char* mutation, const char* report_path, size_t* failures) {
  return guarded([&] {
    need(report_path, "report_path");
    need(failures, "failures");
    proxlab::VerifyOptions options;
    if (mutation) {
      const auto m = proxlab::parse_mutation(mutation);
      if (!m) proxlab::fail(proxlab::ErrorCode::invalid_argument, std::string("unknown mutation: ") + mutation);
      options.mutation = *m;
    }
    const auto report = proxlab::run_verify(options);
    proxlab::write_text_file(report_path, report.text());
    *failures = report.failures();
  });
}

}  // extern "C"
