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

#include "v2vrl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "v2vrl/errors.hpp"
#include "v2vrl/replay.hpp"

namespace v2vrl {

void TrainerConfig::validate() const {
  if (episodes < 0) throw ConfigError("episodes must be >= 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must be in [0, 1)");
  if (!(eps_start >= 0.0 && eps_start <= 1.0)) throw ConfigError("eps_start must be in [0, 1]");
  if (!(eps_end >= 0.0 && eps_end <= eps_start)) throw ConfigError("eps_end must be in [0, eps_start]");
  if (!(eps_anneal_frac >= 0.0 && eps_anneal_frac <= 1.0)) throw ConfigError("eps_anneal_frac must be in [0, 1]");
  if (target_sync_steps < 1) throw ConfigError("target_sync_steps must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (batch < 1) throw ConfigError("batch must be >= 1");
  if (replay_capacity < batch) throw ConfigError("replay_capacity must be >= batch");
  for (int h : hidden)
    if (h < 1) throw ConfigError("hidden_sizes entries must be >= 1");
}

double epsilon(const TrainerConfig& cfg, int episode) {
  const double window = cfg.eps_anneal_frac * cfg.episodes;
  if (window <= 0.0) return cfg.eps_end;
  const double frac = std::min(1.0, episode / window);
  return cfg.eps_start * (1.0 - frac) + cfg.eps_end * frac;
}

int greedy_index(std::span<const double> q_values) {
  return static_cast<int>(std::max_element(q_values.begin(), q_values.end()) - q_values.begin());
}

Action select_action(const QNetwork& net, std::span<const double> features, double eps, int power_count, Rng& rng) {
  if (uniform01(rng) < eps) {
    std::uniform_int_distribution<int> d(0, net.output_dim() - 1);
    return Action::from_flat(d(rng), power_count);
  }
  return Action::from_flat(greedy_index(net.forward(features)), power_count);
}

double td_target(double r, std::span<const double> s_next, bool terminal, const QNetwork& target_net, double gamma) {
  if (terminal) return r;
  const auto q = target_net.forward(s_next);
  return r + gamma * *std::max_element(q.begin(), q.end());
}

std::vector<int> network_dims(const EnvConfig& env, const TrainerConfig& cfg) {
  std::vector<int> dims{env.observation_dim()};
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(env.action_count());
  return dims;
}

TrainResult train(const EnvConfig& env_cfg, const TrainerConfig& cfg, std::uint64_t seed,
                  const UpdateObserver& observer) {
  cfg.validate();
  Environment env(env_cfg);
  Rng init_rng = rng_stream(seed, "init");
  Rng explore = rng_stream(seed, "explore");
  Rng replay_rng = rng_stream(seed, "replay");

  TrainResult result;
  result.net = QNetwork::glorot(network_dims(env_cfg, cfg), init_rng);
  QNetwork target = copy_params(result.net);
  ReplayMemory memory(static_cast<std::size_t>(cfg.replay_capacity), env_cfg.observation_dim(),
                      env_cfg.action_count());
  Gradient grad(result.net);
  const int pc = env_cfg.power_count();

  for (int e = 0; e < cfg.episodes; ++e) {
    Rng mobility = rng_stream(seed, "train-mobility", static_cast<std::uint64_t>(e));
    Rng channel = rng_stream(seed, "train-channel", static_cast<std::uint64_t>(e));
    env.reset(mobility, channel);
    const double eps = epsilon(cfg, e);
    const int n = env.agents();

    std::vector<std::vector<double>> feats(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) feats[static_cast<std::size_t>(k)] = env.observations()[static_cast<std::size_t>(k)].features();
    std::vector<double> episode_reward(static_cast<std::size_t>(n), 0.0);
    std::vector<Action> actions(static_cast<std::size_t>(n));

    while (!env.finished()) {
      std::vector<bool> was_active(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        was_active[i] = env.active(k);
        actions[i] = was_active[i] ? select_action(result.net, feats[i], eps, pc, explore) : Action{};
      }
      const StepOutcome out = env.step(actions, channel);
      for (int k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        if (!was_active[i]) continue;
        auto next = out.next_obs[i].features();
        memory.push({feats[i], actions[i].flat(pc), out.rewards[i], next, static_cast<bool>(out.done[i])});
        episode_reward[i] += out.rewards[i];
        feats[i] = std::move(next);
      }

      const auto batch = memory.sample_ages(static_cast<std::size_t>(cfg.batch), replay_rng);
      if (!batch) continue;
      grad.set_zero();
      double abs_q = 0.0;
      for (const std::size_t age : *batch) {
        const Transition& t = memory.at_age(age);
        const double y = td_target(t.r, t.s_next, t.terminal, target, cfg.gamma);
        abs_q += std::abs(accumulate_td_gradient(result.net, t.s, t.a, y, grad));
      }
      abs_q /= static_cast<double>(batch->size());
      if (!(abs_q <= 1e6))
        throw TrainingError("training diverged: mean |Q| = " + std::to_string(abs_q) + " in episode " +
                            std::to_string(e));
      grad *= 1.0 / static_cast<double>(batch->size());
      sgd_update(result.net, grad, cfg.lr);
      ++result.updates;
      if (result.updates % cfg.target_sync_steps == 0) target = copy_params(result.net);
      if (observer) observer(result.updates, result.net, target);
    }

    EpisodeLog entry;
    entry.episode = e;
    entry.epsilon = eps;
    int successes = 0;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      successes += env.succeeded(k) ? 1 : 0;
      total += episode_reward[static_cast<std::size_t>(k)];
    }
    entry.mean_reward = total / n;
    entry.success_rate = static_cast<double>(successes) / n;
    result.log.push_back(entry);
  }
  return result;
}

void write_training_log(std::ostream& out, const std::vector<EpisodeLog>& log) {
  out << "episode,epsilon,mean_reward,success_rate\n";
  char buf[128];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.9g,%.6f\n", e.episode, e.epsilon, e.mean_reward, e.success_rate);
    out << buf;
  }
}

EvalMetrics evaluate_policy(const EnvConfig& env_cfg, int episodes, std::uint64_t seed, const ActionPolicy& policy,
                            EvalTrace* trace) {
  if (episodes < 1) throw ContractViolation("evaluate: episodes must be >= 1");
  Environment env(env_cfg);
  Rng policy_rng = rng_stream(seed, "eval-policy");
  EvalMetrics m;
  double v2i_sum = 0.0;
  long v2i_samples = 0;
  if (trace) trace->clear();

  for (int e = 0; e < episodes; ++e) {
    Rng mobility = rng_stream(seed, "eval-mobility", static_cast<std::uint64_t>(e));
    Rng channel = rng_stream(seed, "eval-channel", static_cast<std::uint64_t>(e));
    env.reset(mobility, channel);
    m.channel_checksums.push_back(env.channel().checksum());
    if (trace) trace->emplace_back();
    const int n = env.agents();
    std::vector<Action> actions(static_cast<std::size_t>(n));
    while (!env.finished()) {
      for (int k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        actions[i] = env.active(k) ? policy(k, env.observations()[i], policy_rng) : Action{};
      }
      if (trace) trace->back().push_back(actions);
      const StepOutcome out = env.step(actions, channel);
      for (double c : out.v2i_capacities) v2i_sum += c;
      v2i_samples += static_cast<long>(out.v2i_capacities.size());
    }
    for (int k = 0; k < n; ++k) m.successes += env.succeeded(k) ? 1 : 0;
    m.agent_episodes += n;
  }
  m.success_probability = static_cast<double>(m.successes) / static_cast<double>(m.agent_episodes);
  m.mean_v2i_capacity_bps = v2i_samples ? v2i_sum / static_cast<double>(v2i_samples) : 0.0;
  return m;
}

EvalMetrics evaluate(const QNetwork& net, const EnvConfig& env_cfg, int episodes, std::uint64_t seed,
                     EvalTrace* trace) {
  const int pc = env_cfg.power_count();
  return evaluate_policy(
      env_cfg, episodes, seed,
      [&](int, const Observation& obs, Rng& rng) { return select_action(net, obs.features(), 0.0, pc, rng); },
      trace);
}

}  // namespace v2vrl
