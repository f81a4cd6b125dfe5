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
#pragma once

#include <span>
#include <string>

#include "core/trainer.hpp"

namespace proxlab {

inline constexpr const char* kMetricsHeader =
    "epoch,timesteps,mean_episode_reward,clipfrac,max_ratio,max_kl,mean_kl,entropy,unimproved_frac,loss,"
    "penalty_alpha";

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

std::string metrics_csv(std::span<const EpochMetrics> series);
std::string metrics_row(const EpochMetrics& m);
/// Throws io-error when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace proxlab
