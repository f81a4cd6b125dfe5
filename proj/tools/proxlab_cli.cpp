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
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "proxlab/proxlab.h"

namespace fs = std::filesystem;

namespace {

int report(proxlab_status s, const char* what) {
  std::fprintf(stderr, "proxlab: %s: %s: %s\n", what, proxlab_status_name(s), proxlab_last_error());
  return 1;
}

bool make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "proxlab: cannot create %s: %s\n", dir.c_str(), ec.message().c_str());
    return false;
  }
  return true;
}

std::optional<std::uint64_t> env_seed(bool& bad) {
  const char* s = std::getenv("PROXLAB_SEED");
  bad = false;
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (errno != 0 || *end != '\0' || *s == '-') {
    bad = true;
    return std::nullopt;
  }
  return v;
}

// Loads the config and applies seed overrides: PROXLAB_SEED over the file,
// --seed over both.
proxlab_config* load_config(const std::string& path, std::optional<std::uint64_t> cli_seed) {
  proxlab_config* cfg = nullptr;
  if (proxlab_status s = proxlab_config_load(path.c_str(), &cfg); s != PROXLAB_OK) {
    report(s, path.c_str());
    return nullptr;
  }
  bool bad = false;
  const auto from_env = env_seed(bad);
  if (bad) {
    std::fprintf(stderr, "proxlab: PROXLAB_SEED must be a non-negative integer\n");
    proxlab_config_free(cfg);
    return nullptr;
  }
  if (from_env) proxlab_config_set_seed(cfg, *from_env);
  if (cli_seed) proxlab_config_set_seed(cfg, *cli_seed);
  return cfg;
}

int train_one(const proxlab_config* cfg, const std::string& out) {
  if (!make_dir(out)) return 1;
  const std::string resolved = out + "/config.resolved";
  if (proxlab_status s = proxlab_config_write_resolved(cfg, resolved.c_str()); s != PROXLAB_OK) {
    return report(s, "writing config.resolved");
  }
  proxlab_run* run = nullptr;
  if (proxlab_status s = proxlab_run_create(cfg, &run); s != PROXLAB_OK) return report(s, "creating run");
  int rc = 0;
  const std::string csv = out + "/metrics.csv";
  if (proxlab_status s = proxlab_run_finish(run); s != PROXLAB_OK) {
    rc = report(s, "training aborted");
    proxlab_run_write_csv(run, csv.c_str());  // keep the epochs that did finish
  } else if (proxlab_status w = proxlab_run_write_csv(run, csv.c_str()); w != PROXLAB_OK) {
    rc = report(w, "writing metrics.csv");
  }
  proxlab_run_free(run);
  return rc;
}

int cmd_train(const std::string& config, const std::string& out, std::optional<std::uint64_t> seed) {
  proxlab_config* cfg = load_config(config, seed);
  if (!cfg) return 1;
  const int rc = train_one(cfg, out);
  proxlab_config_free(cfg);
  return rc;
}

int cmd_sweep(const std::string& config, std::size_t seeds, const std::string& out) {
  proxlab_config* base = load_config(config, std::nullopt);
  if (!base) return 1;
  std::uint64_t first = 0;
  proxlab_config_seed(base, &first);
  proxlab_config_free(base);

  std::vector<int> codes(seeds, 0);
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < seeds; start += workers) {
    std::vector<std::thread> pool;
    for (std::size_t k = start; k < std::min(seeds, start + workers); ++k) {
      pool.emplace_back([&, k] {
        proxlab_config* cfg = load_config(config, first + k);
        if (!cfg) {
          codes[k] = 1;
          return;
        }
        codes[k] = train_one(cfg, out + "/seed_" + std::to_string(first + k));
        proxlab_config_free(cfg);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (int c : codes) {
    if (c != 0) return 1;
  }
  return 0;
}

int cmd_verify(const std::string& out, const std::string& fixture) {
  if (!make_dir(out)) return 1;
  const std::string path = out + "/verify_report.txt";
  std::size_t failures = 0;
  if (proxlab_status s = proxlab_verify(fixture.c_str(), path.c_str(), &failures); s != PROXLAB_OK) {
    return report(s, "verify");
  }
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (f) {
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) std::fwrite(buf, 1, n, stdout);
    std::fclose(f);
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clipped, rollback and trust-region policy optimization toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", proxlab_version());

  std::string config, out, fixture = "none";
  std::optional<std::uint64_t> seed;
  std::size_t seeds = 5;

  auto* train = app.add_subcommand("train", "Train one run and write metrics.csv");
  train->add_option("--config", config, "Config file (key = value)")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out, "Output directory")->required();
  train->add_option("--seed", seed, "Seed; overrides PROXLAB_SEED and the config");

  auto* verify = app.add_subcommand("verify", "Run the property checks and write verify_report.txt");
  verify->add_option("--out", out, "Output directory")->required();
  verify->add_option("--fixture", fixture, "Inject a defect: none, rollback_slope, drop_min")
      ->check(CLI::IsMember({"none", "rollback_slope", "drop_min"}));

  auto* sweep = app.add_subcommand("sweep", "Train consecutive seeds into seed_<n>/ subdirectories");
  sweep->add_option("--config", config, "Config file (key = value)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--seeds", seeds, "Number of seeds")->required()->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) return cmd_train(config, out, seed);
  if (sweep->parsed()) return cmd_sweep(config, seeds, out);
  return cmd_verify(out, fixture);
}
