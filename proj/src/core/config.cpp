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
#include "core/config.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "core/error.hpp"
#include "core/metrics_io.hpp"

namespace proxlab {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

class LineError {
 public:
  explicit LineError(std::size_t line) : line_(line) {}
  [[noreturn]] void operator()(const std::string& what) const {
    fail(ErrorCode::parse_error, "line " + std::to_string(line_) + ": " + what);
  }

 private:
  std::size_t line_;
};

double to_double(std::string_view v, const LineError& err) {
  v = trim(v);
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x)) {
    err("expected a number, got '" + std::string(v) + "'");
  }
  return x;
}

std::uint64_t to_unsigned(std::string_view v, const LineError& err) {
  v = trim(v);
  std::uint64_t x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    err("expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return x;
}

std::size_t to_positive(std::string_view v, const LineError& err) {
  const auto x = to_unsigned(v, err);
  if (x == 0) err("value must be positive");
  return static_cast<std::size_t>(x);
}

// Either a number or linear(start, end).
struct Scheduled {
  double value = 0.0;
  std::optional<LinearAnneal> anneal;
};

Scheduled to_scheduled(std::string_view v, const LineError& err) {
  v = trim(v);
  Scheduled s;
  if (v.starts_with("linear(") && v.ends_with(")")) {
    const auto inner = v.substr(7, v.size() - 8);
    const auto comma = inner.find(',');
    if (comma == std::string_view::npos) err("linear() takes two arguments");
    LinearAnneal a{to_double(inner.substr(0, comma), err), to_double(inner.substr(comma + 1), err)};
    s.anneal = a;
    s.value = a.start;
    return s;
  }
  s.value = to_double(v, err);
  return s;
}

std::string scheduled_text(double value, const std::optional<LinearAnneal>& a) {
  if (a) return "linear(" + format_double(a->start) + ", " + format_double(a->end) + ")";
  return format_double(value);
}

}  // namespace

TrainConfig parse_config_text(std::string_view text) {
  TrainConfig c;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const LineError err(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) err("expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) err("missing value for '" + key + "'");
    if (!seen.insert(key).second) err("duplicate key '" + key + "'");

    if (key == "variant") {
      const auto v = parse_variant(value);
      if (!v) err("unknown variant '" + std::string(value) + "'");
      c.objective.variant = *v;
    } else if (key == "env") {
      const std::string name(value);
      if (name != "balance" && name != "pointmass" && name != "chain") err("unknown env '" + name + "'");
      c.env = name;
    } else if (key == "epsilon") {
      const auto s = to_scheduled(value, err);
      const double hi = s.anneal ? std::max(s.anneal->start, s.anneal->end) : s.value;
      const double lo = s.anneal ? std::min(s.anneal->start, s.anneal->end) : s.value;
      if (!(hi < 1.0) || !(s.value > 0.0) || lo < 0.0) err("epsilon must lie in (0, 1)");
      c.objective.epsilon = s.value;
      c.epsilon_anneal = s.anneal;
    } else if (key == "delta") {
      const auto s = to_scheduled(value, err);
      const double lo = s.anneal ? std::min(s.anneal->start, s.anneal->end) : s.value;
      if (!(s.value > 0.0) || lo < 0.0) err("delta must be positive");
      c.objective.delta = s.value;
      c.delta_anneal = s.anneal;
    } else if (key == "alpha") {
      c.objective.alpha = to_double(value, err);
      if (!(c.objective.alpha > 0.0)) err("alpha must be positive");
    } else if (key == "penalty_target") {
      c.objective.penalty_target = to_double(value, err);
      if (!(c.objective.penalty_target > 0.0)) err("penalty_target must be positive");
    } else if (key == "penalty_adapt_factor") {
      c.objective.penalty_adapt_factor = to_double(value, err);
      if (!(c.objective.penalty_adapt_factor > 1.0)) err("penalty_adapt_factor must exceed 1");
    } else if (key == "total_timesteps") {
      c.total_timesteps = to_positive(value, err);
    } else if (key == "timesteps_per_epoch") {
      c.timesteps_per_epoch = to_positive(value, err);
    } else if (key == "minibatch_size") {
      c.minibatch_size = to_positive(value, err);
    } else if (key == "optimization_epochs") {
      c.optimization_epochs = to_positive(value, err);
    } else if (key == "learning_rate") {
      c.learning_rate = to_double(value, err);
      if (!(c.learning_rate > 0.0)) err("learning_rate must be positive");
    } else if (key == "gamma") {
      c.gamma = to_double(value, err);
      if (!(c.gamma > 0.0 && c.gamma <= 1.0)) err("gamma must lie in (0, 1]");
    } else if (key == "lambda") {
      c.lambda = to_double(value, err);
      if (!(c.lambda >= 0.0 && c.lambda <= 1.0)) err("lambda must lie in [0, 1]");
    } else if (key == "n_envs") {
      c.n_envs = to_positive(value, err);
    } else if (key == "seed") {
      c.seed = to_unsigned(value, err);
    } else if (key == "entropy_coef") {
      c.entropy_coef = to_double(value, err);
      if (!(*c.entropy_coef >= 0.0)) err("entropy_coef must be non-negative");
    } else if (key == "value_loss_coef") {
      c.value_loss_coef = to_double(value, err);
      if (!(c.value_loss_coef >= 0.0)) err("value_loss_coef must be non-negative");
    } else if (key == "hidden") {
      c.hidden.clear();
      std::string_view rest = value;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        c.hidden.push_back(to_positive(rest.substr(0, comma), err));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
    } else if (key == "init_log_std") {
      c.init_log_std = to_double(value, err);
    } else {
      err("unknown key '" + key + "'");
    }
  }

  // Per-variant defaults for whatever the file left unset.
  const Variant v = c.objective.variant;
  if (!seen.count("alpha")) {
    if (v == Variant::TRULY || v == Variant::TR_RB_RATIO) c.objective.alpha = 5.0;
    if (v == Variant::PENALTY) c.objective.alpha = 1.0;
  }
  if (!seen.count("delta")) {
    if (v == Variant::TRULY || v == Variant::TR_RB_RATIO) c.objective.delta = 0.03;
  }
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorCode::parse_error, e.what());
  }
  return c;
}

TrainConfig parse_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    fail(ErrorCode::parse_error, e.what());
  }
  return parse_config_text(text);
}

std::string resolved_config_text(const TrainConfig& c) {
  std::string out;
  auto line = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  std::string variant = to_string(c.objective.variant);
  for (char& ch : variant) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  line("variant", variant);
  line("env", c.env);
  line("epsilon", scheduled_text(c.objective.epsilon, c.epsilon_anneal));
  line("delta", scheduled_text(c.objective.delta, c.delta_anneal));
  line("alpha", format_double(c.objective.alpha));
  line("penalty_target", format_double(c.objective.penalty_target));
  line("penalty_adapt_factor", format_double(c.objective.penalty_adapt_factor));
  line("total_timesteps", std::to_string(c.total_timesteps));
  line("timesteps_per_epoch", std::to_string(c.timesteps_per_epoch));
  line("minibatch_size", std::to_string(c.minibatch_size));
  line("optimization_epochs", std::to_string(c.optimization_epochs));
  line("learning_rate", format_double(c.learning_rate));
  line("gamma", format_double(c.gamma));
  line("lambda", format_double(c.lambda));
  line("n_envs", std::to_string(c.n_envs));
  line("seed", std::to_string(c.seed));
  if (c.entropy_coef) {
    line("entropy_coef", format_double(*c.entropy_coef));
  } else {
    const bool discrete = c.env != "pointmass";
    line("entropy_coef", format_double(discrete ? 0.01 : 0.0));
  }
  line("value_loss_coef", format_double(c.value_loss_coef));
  std::string hidden;
  for (std::size_t i = 0; i < c.hidden.size(); ++i) hidden += (i ? "," : "") + std::to_string(c.hidden[i]);
  line("hidden", hidden);
  line("init_log_std", format_double(c.init_log_std));
  return out;
}

}  // namespace proxlab
