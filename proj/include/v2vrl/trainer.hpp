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
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "v2vrl/environment.hpp"
#include "v2vrl/qnet.hpp"
#include "v2vrl/rng.hpp"

namespace v2vrl {

struct TrainerConfig {
  int episodes = 3000;
  double gamma = 0.95;
  double eps_start = 1.0;
  double eps_end = 0.02;
  double eps_anneal_frac = 0.8;
  int target_sync_steps = 500;
  double lr = 1e-3;
  int batch = 64;
  int replay_capacity = 100000;
  std::vector<int> hidden{64, 32};

  void validate() const;

  friend bool operator==(const TrainerConfig&, const TrainerConfig&) = default;
};

// Linear anneal from eps_start to eps_end over the first
// eps_anneal_frac * episodes episodes, then flat.
double epsilon(const TrainerConfig& cfg, int episode);

// Lowest index among the maxima.
int greedy_index(std::span<const double> q_values);

// Epsilon-greedy over the network's Q-values. One uniform draw decides
// explore vs exploit; exploring draws one more integer.
Action select_action(const QNetwork& net, std::span<const double> features, double eps, int power_count, Rng& rng);

// r if terminal, else r + gamma * max_a Q_target(s_next, a).
double td_target(double r, std::span<const double> s_next, bool terminal, const QNetwork& target_net, double gamma);

struct EpisodeLog {
  int episode = 0;
  double epsilon = 0.0;
  double mean_reward = 0.0;  // per-agent episode reward, averaged over agents
  double success_rate = 0.0;

  friend bool operator==(const EpisodeLog&, const EpisodeLog&) = default;
};

struct TrainResult {
  QNetwork net;
  std::vector<EpisodeLog> log;
  long updates = 0;
};

std::vector<int> network_dims(const EnvConfig& env, const TrainerConfig& cfg);

// Shared-parameter deep Q-learning with one shared replay memory and a hard
// synchronized target network. All randomness derives from `seed`.
// Throws TrainingError when the mean |Q| of a mini-batch exceeds 1e6.
// Called after every gradient step (and after a target sync on that step).
using UpdateObserver = std::function<void(long updates, const QNetwork& online, const QNetwork& target)>;

TrainResult train(const EnvConfig& env_cfg, const TrainerConfig& cfg, std::uint64_t seed,
                  const UpdateObserver& observer = {});

// "episode,epsilon,mean_reward,success_rate" rows.
void write_training_log(std::ostream& out, const std::vector<EpisodeLog>& log);

// Acting rule for evaluation: (agent index, observation, policy stream).
using ActionPolicy = std::function<Action(int agent, const Observation& obs, Rng& rng)>;

struct EvalMetrics {
  double success_probability = 0.0;
  double mean_v2i_capacity_bps = 0.0;
  long agent_episodes = 0;
  long successes = 0;
  std::vector<std::uint64_t> channel_checksums;  // initial channel state per episode
};

// Per-episode record of the joint actions taken in each slot.
using EvalTrace = std::vector<std::vector<std::vector<Action>>>;

// Runs `episodes` evaluation episodes. Channel and geometry streams depend
// only on (seed, episode), so different policies with the same seed face the
// same realizations.
EvalMetrics evaluate_policy(const EnvConfig& env_cfg, int episodes, std::uint64_t seed, const ActionPolicy& policy,
                            EvalTrace* trace = nullptr);

// Greedy (epsilon = 0) evaluation of a trained network.
EvalMetrics evaluate(const QNetwork& net, const EnvConfig& env_cfg, int episodes, std::uint64_t seed,
                     EvalTrace* trace = nullptr);

}  // namespace v2vrl
