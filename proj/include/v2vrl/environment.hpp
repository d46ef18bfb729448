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
#include <span>
#include <vector>

#include "v2vrl/channel.hpp"
#include "v2vrl/geometry.hpp"
#include "v2vrl/rng.hpp"

namespace v2vrl {

struct RewardParams {
  double w_i = 1.0;
  double w_v = 1.0;
  double w_t = 1.0;
  double r_success = 1.0;
  double r_fail = 2.0;
  double c_ref_bps = 10e6;

  friend bool operator==(const RewardParams&, const RewardParams&) = default;
};

struct EnvConfig {
  Layout layout;
  int n_vehicles = 20;
  int subbands = 4;
  std::vector<double> power_levels_dbm{23.0, 10.0, 5.0};
  double v2i_power_dbm = 0.0;
  double bandwidth_hz = 1e6;
  double noise_dbm = -114.0;
  double slot_ms = 1.0;
  int budget_slots = 100;
  double payload_bits = 150000.0;
  int neighbors = 3;
  RewardParams reward;
  ShadowingSigma shadow;
  Fading fading = Fading::rayleigh;

  // When set, reset() uses this geometry instead of a random drop (frozen
  // micro-instances). V2I user i serves sub-band i.
  std::optional<std::vector<Vehicle>> fixed_vehicles;
  std::optional<std::vector<Vehicle>> fixed_v2i_users;

  int power_count() const { return static_cast<int>(power_levels_dbm.size()); }
  int action_count() const { return subbands * power_count(); }
  int observation_dim() const { return 4 * subbands + 2; }
  int max_power_level() const;
  double slot_s() const { return slot_ms * 1e-3; }

  // Throws ConfigError naming the first offending key.
  void validate() const;

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

struct Action {
  int subband = 0;
  int power_level = 0;

  int flat(int power_count) const { return subband * power_count + power_level; }
  static Action from_flat(int index, int power_count) { return {index / power_count, index % power_count}; }

  friend bool operator==(const Action&, const Action&) = default;
};

// Raw per-agent state. Gains in dB, interference in dBm, neighbor counts as
// counts; features() applies the fixed affine normalization fed to the
// network.
struct Observation {
  std::vector<double> g_db;
  std::vector<double> i_prev_dbm;
  std::vector<double> h_db;
  std::vector<double> b_prev;
  double load_frac = 1.0;
  double time_frac = 1.0;

  std::vector<double> features() const;

  friend bool operator==(const Observation&, const Observation&) = default;
};

enum class Terminal { none, success, failure };

struct StepOutcome {
  std::vector<double> rewards;
  std::vector<Observation> next_obs;
  std::vector<double> v2i_capacities;  // per sub-band, bits/s
  std::vector<double> v2v_capacities;  // per link, bits/s (0 when idle)
  std::vector<double> delivered_bits;
  std::vector<bool> done;
  std::vector<Terminal> terminal;  // what happened to each agent in this slot
};

// One transmitter as seen by the SINR formulas. Powers in mW.
struct Transmission {
  bool active = false;
  int subband = 0;
  double power_mw = 0.0;
};

inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

// SINR of the V2I uplink owning band m, interfered by every active V2V
// transmitter on m.
double sinr_v2i(int m, std::span<const Transmission> tx, const ChannelState& ch, double v2i_power_mw,
                double noise_mw);

// SINR of V2V link k: the V2I user of its band plus every other active
// co-band V2V transmitter interfere. Throws ContractViolation if k is idle.
double sinr_v2v(int k, std::span<const Transmission> tx, const ChannelState& ch, double v2i_power_mw,
                double noise_mw);

// Shannon capacity in bits/s.
double capacity(double sinr, double bandwidth_hz);

double reward(const RewardParams& p, std::span<const double> v2i_capacities, double v2v_capacity, double time_frac,
              Terminal terminal);

// The multi-agent vehicular MDP. All agents act simultaneously once per slot.
//
// Fast fading for slot t is drawn before the agents act in slot t, so the
// gains in the observation are the ones the slot's transmissions experience;
// interference and neighbor band usage in the observation are those measured
// during the previous slot.
class Environment {
 public:
  explicit Environment(EnvConfig cfg);

  const EnvConfig& config() const { return cfg_; }

  // Drops vehicles and V2I users (mobility stream), forms links, samples
  // large-scale fading and the first slot's fast fading (channel stream).
  std::vector<Observation> reset(Rng& mobility, Rng& channel);

  // reset() with explicit geometry. V2I user i serves sub-band i.
  std::vector<Observation> reset_with(std::vector<Vehicle> vehicles, std::vector<Vehicle> v2i_users, Rng& channel);

  // Advances one slot. actions.size() must equal agents(); entries of done
  // agents are ignored.
  StepOutcome step(std::span<const Action> actions, Rng& channel);

  int agents() const { return static_cast<int>(links_.size()); }
  bool active(int k) const;
  bool finished() const;
  int slot() const { return slot_; }

  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const std::vector<Vehicle>& v2i_users() const { return v2i_users_; }
  const std::vector<V2VLink>& links() const { return links_; }
  const std::vector<std::vector<int>>& neighbor_sets() const { return neighbors_; }
  const LargeScale& large_scale() const { return large_; }
  const ChannelState& channel() const { return channel_; }
  const std::vector<Observation>& observations() const { return obs_; }
  double remaining_bits(int k) const { return load_[static_cast<std::size_t>(k)]; }
  int remaining_slots(int k) const { return budget_[static_cast<std::size_t>(k)]; }
  bool succeeded(int k) const { return load_[static_cast<std::size_t>(k)] <= 0.0; }

 private:
  void init_episode(Rng& channel);
  Observation observe(int k, const std::vector<double>& i_prev_dbm, const std::vector<double>& b_prev) const;

  EnvConfig cfg_;
  std::vector<double> power_mw_;
  double v2i_power_mw_ = 0.0;
  double noise_mw_ = 0.0;

  std::vector<Vehicle> vehicles_;
  std::vector<Vehicle> v2i_users_;
  std::vector<V2VLink> links_;
  std::vector<std::vector<int>> neighbors_;
  LargeScale large_;
  ChannelState channel_;
  std::vector<double> load_;
  std::vector<int> budget_;
  std::vector<Observation> obs_;
  int slot_ = 0;
};

}  // namespace v2vrl
