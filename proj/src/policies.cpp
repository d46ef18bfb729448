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

#include "v2vrl/policies.hpp"

#include <cmath>
#include <functional>

#include "v2vrl/errors.hpp"

namespace v2vrl {

std::string_view policy_tag(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::random_baseline:
      return "random";
    case PolicyKind::greedy_qnet:
      return "dqn";
    case PolicyKind::oracle:
      return "oracle";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy(std::string_view tag) {
  if (tag == "random") return PolicyKind::random_baseline;
  if (tag == "dqn") return PolicyKind::greedy_qnet;
  if (tag == "oracle") return PolicyKind::oracle;
  return std::nullopt;
}

Action random_action(int subbands, int max_power_level, Rng& rng) {
  std::uniform_int_distribution<int> band(0, subbands - 1);
  return {band(rng), max_power_level};
}

double discounted_return(const std::vector<std::vector<double>>& rewards_per_slot, double gamma) {
  double total = 0.0;
  double discount = 1.0;
  for (const auto& slot : rewards_per_slot) {
    for (double r : slot) total += discount * r;
    discount *= gamma;
  }
  return total;
}

namespace {

void require_frozen(const EnvConfig& cfg) {
  if (cfg.fading != Fading::frozen || cfg.shadow.v2v_db != 0.0 || cfg.shadow.v2i_db != 0.0 || !cfg.fixed_vehicles)
    throw ContractViolation("oracle: instance must have fixed geometry, frozen fading and zero shadowing");
}

Environment frozen_start(const EnvConfig& cfg) {
  Environment env(cfg);
  Rng unused(0);
  env.reset(unused, unused);
  return env;
}

struct Search {
  double gamma;
  int agents;
  int actions;
  int power_count;
  long joint_count;
  OracleResult best;
  bool have_best = false;
  std::vector<std::vector<Action>> path;
  Rng unused{0};

  void visit(const Environment& env, double acc, double discount) {
    if (env.finished()) {
      ++best.sequences_evaluated;
      if (!have_best || acc > best.best_return) {
        best.best_return = acc;
        best.best_sequence = path;
        have_best = true;
      }
      return;
    }
    std::vector<Action> joint(static_cast<std::size_t>(agents));
    for (long code = 0; code < joint_count; ++code) {
      // Agent 0 is the most significant digit so codes run in lexicographic order.
      long rest = code;
      for (int k = agents - 1; k >= 0; --k) {
        joint[static_cast<std::size_t>(k)] = Action::from_flat(static_cast<int>(rest % actions), power_count);
        rest /= actions;
      }
      Environment next = env;
      const StepOutcome out = next.step(joint, unused);
      double r = 0.0;
      for (double x : out.rewards) r += x;
      path.push_back(joint);
      visit(next, acc + discount * r, discount * gamma);
      path.pop_back();
    }
  }
};

}  // namespace

OracleResult oracle_best_return(const EnvConfig& cfg, double gamma) {
  require_frozen(cfg);
  const int agents = cfg.n_vehicles;
  const int actions = cfg.action_count();
  const double joint = std::pow(static_cast<double>(actions), agents);
  const double sequences = std::pow(joint, cfg.budget_slots);
  if (!(sequences <= kOracleMaxSequences))
    throw OracleRefused("oracle: " + std::to_string(sequences) + " joint action sequences exceed the bound of 1e7");

  Search s{gamma, agents, actions, cfg.power_count(), static_cast<long>(joint), {}, false, {}, Rng(0)};
  s.visit(frozen_start(cfg), 0.0, 1.0);
  return s.best;
}

double frozen_rollout_return(const EnvConfig& cfg, const ActionPolicy& policy, double gamma, std::uint64_t seed) {
  require_frozen(cfg);
  Environment env = frozen_start(cfg);
  Rng policy_rng = rng_stream(seed, "rollout-policy");
  Rng unused(0);
  std::vector<std::vector<double>> rewards;
  std::vector<Action> joint(static_cast<std::size_t>(env.agents()));
  while (!env.finished()) {
    for (int k = 0; k < env.agents(); ++k) {
      const auto i = static_cast<std::size_t>(k);
      joint[i] = env.active(k) ? policy(k, env.observations()[i], policy_rng) : Action{};
    }
    rewards.push_back(env.step(joint, unused).rewards);
  }
  return discounted_return(rewards, gamma);
}

EnvConfig micro_instance_config() {
  EnvConfig cfg;
  cfg.layout.kind = LayoutKind::highway;
  cfg.layout.highway_len_m = 1000.0;
  cfg.n_vehicles = 2;
  cfg.subbands = 2;
  cfg.power_levels_dbm = {23.0};
  cfg.budget_slots = 3;
  cfg.payload_bits = 6000.0;
  cfg.neighbors = 1;
  cfg.shadow = {0.0, 0.0};
  cfg.fading = Fading::frozen;
  cfg.fixed_vehicles = std::vector<Vehicle>{{0, {300.0, 0.0}, 12.0, {1.0, 0.0}}, {1, {480.0, 0.0}, 12.0, {-1.0, 0.0}}};
  cfg.fixed_v2i_users =
      std::vector<Vehicle>{{2, {0.0, 0.0}, 12.0, {1.0, 0.0}}, {3, {1000.0, 0.0}, 12.0, {-1.0, 0.0}}};
  return cfg;
}

TrainerConfig micro_trainer_config() {
  TrainerConfig cfg;
  cfg.episodes = 2000;
  cfg.batch = 32;
  cfg.target_sync_steps = 100;
  cfg.replay_capacity = 10000;
  return cfg;
}

OracleCheckReport oracle_check(int train_episodes, std::uint64_t seed) {
  const EnvConfig env = micro_instance_config();
  TrainerConfig tc = micro_trainer_config();
  tc.episodes = train_episodes;

  OracleCheckReport rep;
  const OracleResult best = oracle_best_return(env, tc.gamma);
  rep.oracle_return = best.best_return;
  rep.sequences = best.sequences_evaluated;

  const QNetwork net = train(env, tc, seed).net;
  const int pc = env.power_count();
  rep.greedy_return = frozen_rollout_return(
      env, [&](int, const Observation& o, Rng& rng) { return select_action(net, o.features(), 0.0, pc, rng); },
      tc.gamma);
  rep.relative_gap = std::abs(rep.greedy_return - rep.oracle_return) / std::abs(rep.oracle_return);

  EvalTrace trace;
  rep.eval_success = evaluate(net, env, 1, seed, &trace).success_probability;
  Environment replay(env);
  Rng unused(0);
  replay.reset(unused, unused);
  for (const auto& joint : trace.front()) replay.step(joint, unused);
  int ok = 0;
  for (int k = 0; k < replay.agents(); ++k) ok += replay.succeeded(k) ? 1 : 0;
  rep.replay_success = static_cast<double>(ok) / replay.agents();
  return rep;
}

}  // namespace v2vrl
