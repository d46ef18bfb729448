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
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "v2vrl/config.hpp"
#include "v2vrl/policies.hpp"

namespace v2vrl {

struct SweepRow {
  int n_vehicles = 0;
  PolicyKind policy = PolicyKind::random_baseline;
  std::uint64_t seed = 0;
  double success_probability = 0.0;
  double mean_v2i_capacity_bps = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

inline constexpr const char* kSweepCsvHeader = "n_vehicles,policy,seed,success_probability,mean_v2i_capacity_bps";

// Worker count: V2VRL_THREADS if set and positive, else hardware threads.
int sweep_threads();

// "20,40,60" -> {20, 40, 60}. Values must be positive.
std::vector<int> parse_count_list(std::string_view text);
// Accepts "a..b" (inclusive) or a comma list such as "1,4,9".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);
std::vector<PolicyKind> parse_policy_list(std::string_view text);

// For every (vehicle count, seed) cell: trains a network when "dqn" is
// requested, then evaluates each policy on the same evaluation seed (paired
// channel realizations; a checksum mismatch between policies is an error).
// Rows come back sorted by (n_vehicles, policy tag, seed). Any failing cell
// aborts the sweep with a std::runtime_error naming it.
// Per-episode training logs keyed by (n_vehicles, seed).
using SweepTrainingLogs = std::map<std::pair<int, std::uint64_t>, std::vector<EpisodeLog>>;

// Called from the worker thread once a (count, seed) cell has finished.
using SweepCellDone = std::function<void(int n_vehicles, std::uint64_t seed)>;

std::vector<SweepRow> run_sweep(const SimConfig& cfg, const std::vector<int>& vehicle_counts,
                                const std::vector<PolicyKind>& policies, const std::vector<std::uint64_t>& seeds,
                                int threads = 0, SweepTrainingLogs* training_logs = nullptr,
                                const SweepCellDone& on_cell_done = {});

std::string sweep_csv(const std::vector<SweepRow>& rows);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

// Evaluates one policy on `env` with the given network (ignored unless
// policy == greedy_qnet).
EvalMetrics evaluate_kind(PolicyKind policy, const EnvConfig& env, const QNetwork* net, int episodes,
                          std::uint64_t eval_seed, double gamma);

}  // namespace v2vrl
