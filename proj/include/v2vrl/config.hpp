// Copyright 2026 The v2vrl Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "v2vrl/environment.hpp"
#include "v2vrl/trainer.hpp"

namespace v2vrl {

// Everything a run needs. Every key has a default.
struct SimConfig {
  EnvConfig env;
  TrainerConfig trainer;
  std::uint64_t seed = 1;
  int eval_episodes = 200;
  std::string output_path = "results.csv";

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

// Flat "key = value" text, one per line, '#' starts a comment. Lists are
// comma- or space-separated; strings may be double-quoted. Unknown keys,
// malformed values and out-of-range values throw ConfigError naming the key.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

// Writes every key; parse_config(format_config(c)) == c.
std::string format_config(const SimConfig& cfg);
void save_config(const SimConfig& cfg, const std::filesystem::path& path);

}  // namespace v2vrl
