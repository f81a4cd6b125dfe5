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
#include "core/metrics_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace proxlab {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string metrics_row(const EpochMetrics& m) {
  std::string row = std::to_string(m.epoch) + "," + std::to_string(m.timesteps);
  for (double v : {m.mean_episode_reward, m.clipfrac, m.max_ratio, m.max_kl, m.mean_kl, m.entropy,
                   m.unimproved_frac, m.loss, m.penalty_alpha}) {
    row += ",";
    row += format_double(v);
  }
  return row;
}

std::string metrics_csv(std::span<const EpochMetrics> series) {
  std::string out = kMetricsHeader;
  out += "\n";
  for (const auto& m : series) {
    out += metrics_row(m);
    out += "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::io_error, "cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) fail(ErrorCode::io_error, "failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace proxlab
