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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "v2vrl/environment.hpp"
#include "v2vrl/rng.hpp"
#include "v2vrl/trainer.hpp"

namespace v2vrl {

enum class PolicyKind { random_baseline, greedy_qnet, oracle };

// CLI / CSV tags: "random", "dqn", "oracle".
std::string_view policy_tag(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view tag);

// The baseline: uniform sub-band, maximum configured power.
Action random_action(int subbands, int max_power_level, Rng& rng);
inline Action random_action(const EnvConfig& cfg, Rng& rng) {
  return random_action(cfg.subbands, cfg.max_power_level(), rng);
}

inline constexpr double kOracleMaxSequences = 1e7;

struct OracleResult {
  double best_return = 0.0;
  // Joint action per slot until every agent is done.
  std::vector<std::vector<Action>> best_sequence;
  long sequences_evaluated = 0;
};

// Total discounted return: sum over agents and slots of gamma^t * r.
double discounted_return(const std::vector<std::vector<double>>& rewards_per_slot, double gamma);

// Exhaustive search over every joint action sequence on a frozen instance
// (fixed geometry, frozen fading, zero shadowing). Ties keep the
// lexicographically smallest sequence (agent 0's flat action most
// significant, earlier slots before later). Throws OracleRefused when
// (actions^agents)^horizon exceeds 1e7 and ContractViolation when the
// instance is not frozen.
OracleResult oracle_best_return(const EnvConfig& cfg, double gamma);

// Plays one episode of a frozen instance under `policy` and returns the
// total discounted return.
double frozen_rollout_return(const EnvConfig& cfg, const ActionPolicy& policy, double gamma, std::uint64_t seed = 0);

// The 2-agent / 2-band / 1-power / 3-slot frozen highway instance used to
// check training and evaluation against exhaustive search.
EnvConfig micro_instance_config();
TrainerConfig micro_trainer_config();

struct OracleCheckReport {
  double oracle_return = 0.0;
  double greedy_return = 0.0;
  double relative_gap = 0.0;  // |greedy - oracle| / |oracle|
  double eval_success = 0.0;
  double replay_success = 0.0;  // recomputed by stepping the recorded actions
  long sequences = 0;
};

// Trains on the micro-instance, then compares the greedy policy with the
// exhaustive optimum and re-derives evaluate()'s success metric from its
// recorded action trace.
OracleCheckReport oracle_check(int train_episodes, std::uint64_t seed);

}  // namespace v2vrl
