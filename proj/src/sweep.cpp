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

#include "v2vrl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "v2vrl/errors.hpp"

namespace v2vrl {

int sweep_threads() {
  if (const char* env = std::getenv("V2VRL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    std::string_view part = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    parts.push_back(part);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view token, std::string_view what) {
  T value{};
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || end != token.data() + token.size())
    throw ConfigError(std::string(what) + ": cannot parse '" + std::string(token) + "'");
  return value;
}

}  // namespace

std::vector<int> parse_count_list(std::string_view text) {
  std::vector<int> out;
  for (std::string_view tok : split_commas(text)) {
    const int n = parse_number<int>(tok, "vehicles");
    if (n < 2) throw ConfigError("vehicles: each count must be at least 2, got " + std::string(tok));
    out.push_back(n);
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  if (const std::size_t dots = text.find(".."); dots != std::string_view::npos) {
    const auto lo = parse_number<std::uint64_t>(text.substr(0, dots), "seeds");
    const auto hi = parse_number<std::uint64_t>(text.substr(dots + 2), "seeds");
    if (hi < lo) throw ConfigError("seeds: empty range " + std::string(text));
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  for (std::string_view tok : split_commas(text)) out.push_back(parse_number<std::uint64_t>(tok, "seeds"));
  return out;
}

std::vector<PolicyKind> parse_policy_list(std::string_view text) {
  std::vector<PolicyKind> out;
  for (std::string_view tok : split_commas(text)) {
    const auto kind = parse_policy(tok);
    if (!kind) throw ConfigError("policies: unknown policy '" + std::string(tok) + "'");
    out.push_back(*kind);
  }
  return out;
}

EvalMetrics evaluate_kind(PolicyKind policy, const EnvConfig& env, const QNetwork* net, int episodes,
                          std::uint64_t eval_seed, double gamma) {
  switch (policy) {
    case PolicyKind::random_baseline:
      return evaluate_policy(env, episodes, eval_seed,
                             [&env](int, const Observation&, Rng& rng) { return random_action(env, rng); });
    case PolicyKind::greedy_qnet:
      if (!net) throw ContractViolation("evaluate: dqn policy needs a network");
      return evaluate(*net, env, episodes, eval_seed);
    case PolicyKind::oracle: {
      const OracleResult best = oracle_best_return(env, gamma);
      // Frozen instances replay identically, so the slot index recovered from
      // the remaining budget selects the precomputed joint action.
      return evaluate_policy(env, episodes, eval_seed, [&](int agent, const Observation& obs, Rng&) {
        const auto slot = static_cast<std::size_t>(std::lround((1.0 - obs.time_frac) * env.budget_slots));
        return best.best_sequence.at(slot).at(static_cast<std::size_t>(agent));
      });
    }
  }
  throw ContractViolation("evaluate: unknown policy");
}

std::vector<SweepRow> run_sweep(const SimConfig& cfg, const std::vector<int>& vehicle_counts,
                                const std::vector<PolicyKind>& policies, const std::vector<std::uint64_t>& seeds,
                                int threads, SweepTrainingLogs* training_logs, const SweepCellDone& on_cell_done) {
  if (vehicle_counts.empty() || policies.empty() || seeds.empty())
    throw ConfigError("sweep: vehicle counts, policies and seeds must be non-empty");
  struct Cell {
    int n;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int n : vehicle_counts)
    for (auto s : seeds) cells.push_back({n, s});

  const bool want_dqn = std::find(policies.begin(), policies.end(), PolicyKind::greedy_qnet) != policies.end();
  std::vector<SweepRow> rows;
  std::mutex mu;
  std::string failure;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size() || abort.load()) return;
      const Cell cell = cells[i];
      PolicyKind current = policies.front();
      try {
        EnvConfig env = cfg.env;
        env.n_vehicles = cell.n;
        env.validate();
        std::optional<QNetwork> net;
        if (want_dqn) {
          current = PolicyKind::greedy_qnet;
          TrainResult trained = train(env, cfg.trainer, cell.seed);
          if (training_logs) {
            std::lock_guard lock(mu);
            (*training_logs)[{cell.n, cell.seed}] = std::move(trained.log);
          }
          net = std::move(trained.net);
        }
        std::vector<SweepRow> local;
        std::vector<std::uint64_t> reference;
        for (PolicyKind p : policies) {
          current = p;
          const EvalMetrics m =
              evaluate_kind(p, env, net ? &*net : nullptr, cfg.eval_episodes, cell.seed, cfg.trainer.gamma);
          if (reference.empty()) {
            reference = m.channel_checksums;
          } else if (m.channel_checksums != reference) {
            throw std::runtime_error("evaluation channels differ between policies");
          }
          local.push_back({cell.n, p, cell.seed, m.success_probability, m.mean_v2i_capacity_bps});
        }
        {
          std::lock_guard lock(mu);
          rows.insert(rows.end(), local.begin(), local.end());
        }
        if (on_cell_done) on_cell_done(cell.n, cell.seed);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        if (failure.empty())
          failure = "sweep cell (n_vehicles=" + std::to_string(cell.n) + ", policy=" +
                    std::string(policy_tag(current)) + ", seed=" + std::to_string(cell.seed) + ") failed: " + e.what();
        abort = true;
      }
    }
  };

  const int workers = std::clamp(threads > 0 ? threads : sweep_threads(), 1, static_cast<int>(cells.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!failure.empty()) throw std::runtime_error(failure);

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.n_vehicles != b.n_vehicles) return a.n_vehicles < b.n_vehicles;
    if (a.policy != b.policy) return policy_tag(a.policy) < policy_tag(b.policy);
    return a.seed < b.seed;
  });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%s,%llu,%.6f,%.3f\n", r.n_vehicles, std::string(policy_tag(r.policy)).c_str(),
                  static_cast<unsigned long long>(r.seed), r.success_probability, r.mean_v2i_capacity_bps);
    out += buf;
  }
  return out;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << sweep_csv(rows);
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace v2vrl
