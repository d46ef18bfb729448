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


// Command-line front end: train, eval, sweep, gradcheck, oracle-check.

#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "v2vrl/config.hpp"
#include "v2vrl/errors.hpp"
#include "v2vrl/policies.hpp"
#include "v2vrl/qnet.hpp"
#include "v2vrl/sweep.hpp"
#include "v2vrl/trainer.hpp"

namespace {

using namespace v2vrl;

SimConfig config_or_default(const std::string& path) { return path.empty() ? SimConfig{} : load_config(path); }

int run_train(const std::string& config_path, const std::string& out, const std::string& log_path) {
  const SimConfig cfg = config_or_default(config_path);
  const TrainResult result = train(cfg.env, cfg.trainer, cfg.seed);
  save_checkpoint(result.net, out);
  if (!log_path.empty()) {
    std::ofstream log(log_path);
    if (!log) throw ConfigError("log: cannot open " + log_path);
    write_training_log(log, result.log);
  }
  const auto& last = result.log.back();
  std::printf("trained %d episodes, %ld updates, final success %.4f -> %s\n", cfg.trainer.episodes, result.updates,
              last.success_rate, out.c_str());
  return 0;
}

int run_eval(const std::string& config_path, const std::string& ckpt, const std::string& policy_tag_text) {
  const SimConfig cfg = config_or_default(config_path);
  const auto kind = parse_policy(policy_tag_text);
  if (!kind) throw ConfigError("policy: unknown policy '" + policy_tag_text + "'");
  std::optional<QNetwork> net;
  if (*kind == PolicyKind::greedy_qnet) {
    if (ckpt.empty()) throw ConfigError("ckpt: the dqn policy needs --ckpt");
    net = load_checkpoint(ckpt);
    if (net->input_dim() != cfg.env.observation_dim() || net->output_dim() != cfg.env.action_count())
      throw ConfigError("ckpt: network shape does not match the configured environment");
  }
  const EvalMetrics m =
      evaluate_kind(*kind, cfg.env, net ? &*net : nullptr, cfg.eval_episodes, cfg.seed, cfg.trainer.gamma);
  std::printf("policy=%s n_vehicles=%d episodes=%d success_probability=%.6f mean_v2i_capacity_bps=%.3f\n",
              std::string(policy_tag(*kind)).c_str(), cfg.env.n_vehicles, cfg.eval_episodes, m.success_probability,
              m.mean_v2i_capacity_bps);
  return 0;
}

int run_sweep_cmd(const std::string& config_path, const std::string& vehicles, const std::string& seeds,
                  const std::string& policies, const std::string& out) {
  const SimConfig cfg = config_or_default(config_path);
  const auto rows =
      run_sweep(cfg, parse_count_list(vehicles), parse_policy_list(policies), parse_seed_list(seeds), sweep_threads());
  write_sweep_csv(rows, out);
  std::printf("wrote %zu rows to %s\n", rows.size(), out.c_str());
  return 0;
}

int run_gradcheck(int triples, std::uint64_t seed) {
  constexpr double kTolerance = 1e-5;
  const GradCheckReport r = gradcheck(triples, seed);
  std::printf("gradcheck: %d triples, %zu entries (%zu skipped at ReLU kinks), max relative error %.3e "
              "(tolerance %.0e)\n",
              r.triples, r.entries, r.kink_skips, r.max_rel_error, kTolerance);
  return r.max_rel_error < kTolerance ? 0 : 1;
}

int run_oracle_check(int episodes, std::uint64_t seed) {
  constexpr double kReturnTolerance = 0.01;
  const OracleCheckReport r = oracle_check(episodes, seed);
  const bool metric_ok = r.eval_success == r.replay_success;
  const bool return_ok = r.relative_gap <= kReturnTolerance;
  std::printf("oracle-check: %ld sequences, oracle return %.6f, greedy return %.6f, gap %.4f%%\n", r.sequences,
              r.oracle_return, r.greedy_return, 100.0 * r.relative_gap);
  std::printf("  success metric: evaluate %.6f, trace replay %.6f -> %s\n", r.eval_success, r.replay_success,
              metric_ok ? "match" : "MISMATCH");
  std::printf("  greedy within 1%% of oracle -> %s\n", return_ok ? "yes" : "NO");
  return metric_ok && return_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"V2V sub-band and power allocation: simulator, DQN trainer, baselines"};
  app.require_subcommand(1);

  std::string config_path, out, ckpt, policy = "random", log_path, vehicles = "20,40,60,80,100", seeds = "1..5",
                                     policies = "random,dqn";
  int triples = 100, episodes = 2000;
  std::uint64_t seed = 1;

  auto* train_cmd = app.add_subcommand("train", "train a shared Q-network and write a checkpoint");
  train_cmd->add_option("--config", config_path, "key = value config file");
  train_cmd->add_option("--out", out, "checkpoint path")->required();
  train_cmd->add_option("--log", log_path, "optional per-episode CSV log");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate one policy");
  eval_cmd->add_option("--config", config_path, "key = value config file");
  eval_cmd->add_option("--ckpt", ckpt, "checkpoint (dqn policy)");
  eval_cmd->add_option("--policy", policy, "random | dqn | oracle");

  auto* sweep_cmd = app.add_subcommand("sweep", "train and evaluate over vehicle counts and seeds");
  sweep_cmd->add_option("--config", config_path, "key = value config file");
  sweep_cmd->add_option("--vehicles", vehicles, "comma-separated vehicle counts");
  sweep_cmd->add_option("--seeds", seeds, "seed range a..b or comma list");
  sweep_cmd->add_option("--policies", policies, "comma-separated policies");
  sweep_cmd->add_option("--out", out, "CSV output path")->required();

  auto* grad_cmd = app.add_subcommand("gradcheck", "compare backprop against finite differences");
  grad_cmd->add_option("--triples", triples, "number of random (network, input, action) triples");
  grad_cmd->add_option("--seed", seed, "seed");

  auto* oracle_cmd = app.add_subcommand("oracle-check", "train on the frozen micro-instance and compare to brute force");
  oracle_cmd->add_option("--episodes", episodes, "training episodes");
  oracle_cmd->add_option("--seed", seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return run_train(config_path, out, log_path);
    if (*eval_cmd) return run_eval(config_path, ckpt, policy);
    if (*sweep_cmd) return run_sweep_cmd(config_path, vehicles, seeds, policies, out);
    if (*grad_cmd) return run_gradcheck(triples, seed);
    if (*oracle_cmd) return run_oracle_check(episodes, seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "v2vrl: error: %s\n", e.what());
    return 2;
  }
  return 2;
}
