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

#include <string>
#include <string_view>

#include "core/trainer.hpp"

namespace proxlab {

/// Parses `key = value` lines; `#` starts a comment. Absent keys take their
/// defaults, including the per-variant defaults for delta and alpha. Unknown
/// keys, malformed values and out-of-range values are parse errors that name
/// the line.
TrainConfig parse_config_text(std::string_view text);
TrainConfig parse_config(const std::string& path);

/// Every effective setting in the same syntax; parsing it back gives an equal config.
std::string resolved_config_text(const TrainConfig& config);

}  // namespace proxlab
