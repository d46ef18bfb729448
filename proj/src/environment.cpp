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

#include "v2vrl/environment.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "v2vrl/errors.hpp"

namespace v2vrl {

namespace {

constexpr double kGainOffsetDb = 120.0;
constexpr double kInterferenceOffsetDbm = 114.0;
constexpr double kDbScale = 60.0;
constexpr double kNeighborScale = 3.0;

}  // namespace

int EnvConfig::max_power_level() const {
  return static_cast<int>(std::max_element(power_levels_dbm.begin(), power_levels_dbm.end()) -
                          power_levels_dbm.begin());
}

void EnvConfig::validate() const {
  layout.validate();
  if (n_vehicles < 2) throw ConfigError("n_vehicles: need at least one V2V pair");
  if (subbands < 1) throw ConfigError("subbands must be >= 1");
  if (power_levels_dbm.empty()) throw ConfigError("power_levels_dbm must not be empty");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz_per_subband must be > 0");
  if (!(slot_ms > 0.0)) throw ConfigError("slot_ms must be > 0");
  if (budget_slots < 1) throw ConfigError("budget_slots must be >= 1");
  if (!(payload_bits > 0.0)) throw ConfigError("payload_bits must be > 0");
  if (!(reward.c_ref_bps > 0.0)) throw ConfigError("c_ref_bps must be > 0");
  if (neighbors < 0) throw ConfigError("neighbors must be >= 0");
  if (shadow.v2v_db < 0.0) throw ConfigError("shadow_sigma_v2v_db must be >= 0");
  if (shadow.v2i_db < 0.0) throw ConfigError("shadow_sigma_v2i_db must be >= 0");
  if (fixed_vehicles.has_value() != fixed_v2i_users.has_value())
    throw ConfigError("fixed geometry needs both vehicles and V2I users");
  if (fixed_vehicles && static_cast<int>(fixed_vehicles->size()) != n_vehicles)
    throw ConfigError("n_vehicles does not match the fixed geometry");
}

std::vector<double> Observation::features() const {
  std::vector<double> f;
  f.reserve(g_db.size() * 4 + 2);
  for (double x : g_db) f.push_back((x + kGainOffsetDb) / kDbScale);
  for (double x : i_prev_dbm) f.push_back((x + kInterferenceOffsetDbm) / kDbScale);
  for (double x : h_db) f.push_back((x + kGainOffsetDb) / kDbScale);
  for (double x : b_prev) f.push_back(x / kNeighborScale);
  f.push_back(load_frac);
  f.push_back(time_frac);
  return f;
}

double sinr_v2i(int m, std::span<const Transmission> tx, const ChannelState& ch, double v2i_power_mw,
                double noise_mw) {
  double denom = noise_mw;
  for (std::size_t k = 0; k < tx.size(); ++k) {
    if (tx[k].active && tx[k].subband == m) denom += tx[k].power_mw * ch.g_vb(static_cast<int>(k), m);
  }
  return v2i_power_mw * ch.g_ib(m) / denom;
}

double sinr_v2v(int k, std::span<const Transmission> tx, const ChannelState& ch, double v2i_power_mw,
                double noise_mw) {
  const auto& own = tx[static_cast<std::size_t>(k)];
  if (!own.active) throw ContractViolation("sinr_v2v: agent " + std::to_string(k) + " is not active");
  const int m = own.subband;
  double denom = noise_mw + v2i_power_mw * ch.g_iv(k, m);
  for (std::size_t j = 0; j < tx.size(); ++j) {
    if (static_cast<int>(j) == k || !tx[j].active || tx[j].subband != m) continue;
    denom += tx[j].power_mw * ch.g_cross(static_cast<int>(j), k, m);
  }
  return own.power_mw * ch.g_vv(k, m) / denom;
}

double capacity(double sinr, double bandwidth_hz) { return bandwidth_hz * std::log2(1.0 + sinr); }

double reward(const RewardParams& p, std::span<const double> v2i_capacities, double v2v_capacity, double time_frac,
              Terminal terminal) {
  const double v2i_sum = std::accumulate(v2i_capacities.begin(), v2i_capacities.end(), 0.0);
  const double m = static_cast<double>(v2i_capacities.size());
  double r = p.w_i * v2i_sum / (m * p.c_ref_bps) + p.w_v * v2v_capacity / p.c_ref_bps - p.w_t * (1.0 - time_frac);
  if (terminal == Terminal::success) r += p.r_success;
  if (terminal == Terminal::failure) r -= p.r_fail;
  return r;
}

Environment::Environment(EnvConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  for (double p : cfg_.power_levels_dbm) power_mw_.push_back(dbm_to_mw(p));
  v2i_power_mw_ = dbm_to_mw(cfg_.v2i_power_dbm);
  noise_mw_ = dbm_to_mw(cfg_.noise_dbm);
}

std::vector<Observation> Environment::reset(Rng& mobility, Rng& channel) {
  if (cfg_.fixed_vehicles) return reset_with(*cfg_.fixed_vehicles, *cfg_.fixed_v2i_users, channel);
  vehicles_ = spawn_vehicles(cfg_.n_vehicles, cfg_.layout, mobility);
  v2i_users_ = drop_on_lanes(cfg_.subbands, cfg_.layout, mobility, cfg_.n_vehicles);
  init_episode(channel);
  return obs_;
}

std::vector<Observation> Environment::reset_with(std::vector<Vehicle> vehicles, std::vector<Vehicle> v2i_users,
                                                 Rng& channel) {
  if (static_cast<int>(v2i_users.size()) != cfg_.subbands)
    throw ContractViolation("reset_with: need exactly one V2I user per sub-band");
  vehicles_ = std::move(vehicles);
  v2i_users_ = std::move(v2i_users);
  init_episode(channel);
  return obs_;
}

void Environment::init_episode(Rng& channel) {
  links_ = form_links(vehicles_);
  const auto n = links_.size();

  auto pos = [&](int id) {
    return std::find_if(vehicles_.begin(), vehicles_.end(), [id](const Vehicle& v) { return v.id == id; })->position;
  };
  neighbors_.assign(n, {});
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 rx = pos(links_[k].rx);
    std::vector<std::pair<double, int>> cand;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      cand.emplace_back(distance(pos(links_[j].tx), rx), static_cast<int>(j));
    }
    const auto keep = std::min<std::size_t>(static_cast<std::size_t>(cfg_.neighbors), cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end());
    for (std::size_t i = 0; i < keep; ++i) neighbors_[k].push_back(cand[i].second);
  }

  large_ = sample_large_scale(vehicles_, links_, v2i_users_, cfg_.layout.center(), cfg_.shadow, channel);
  channel_ = build_channel_state(large_, cfg_.subbands, cfg_.fading, channel);
  load_.assign(n, cfg_.payload_bits);
  budget_.assign(n, cfg_.budget_slots);
  slot_ = 0;

  const std::vector<double> noise(static_cast<std::size_t>(cfg_.subbands), cfg_.noise_dbm);
  const std::vector<double> zeros(static_cast<std::size_t>(cfg_.subbands), 0.0);
  obs_.clear();
  for (std::size_t k = 0; k < n; ++k) obs_.push_back(observe(static_cast<int>(k), noise, zeros));
}

bool Environment::active(int k) const {
  const auto i = static_cast<std::size_t>(k);
  return load_[i] > 0.0 && budget_[i] > 0;
}

bool Environment::finished() const {
  for (int k = 0; k < agents(); ++k)
    if (active(k)) return false;
  return true;
}

Observation Environment::observe(int k, const std::vector<double>& i_prev_dbm,
                                 const std::vector<double>& b_prev) const {
  Observation o;
  const int m_count = cfg_.subbands;
  o.g_db.resize(static_cast<std::size_t>(m_count));
  o.h_db.resize(static_cast<std::size_t>(m_count));
  for (int m = 0; m < m_count; ++m) {
    o.g_db[static_cast<std::size_t>(m)] = linear_to_db(channel_.g_vv(k, m));
    o.h_db[static_cast<std::size_t>(m)] = linear_to_db(channel_.g_vb(k, m));
  }
  o.i_prev_dbm = i_prev_dbm;
  o.b_prev = b_prev;
  o.load_frac = load_[static_cast<std::size_t>(k)] / cfg_.payload_bits;
  o.time_frac = static_cast<double>(budget_[static_cast<std::size_t>(k)]) / cfg_.budget_slots;
  return o;
}

StepOutcome Environment::step(std::span<const Action> actions, Rng& channel) {
  const int n = agents();
  const auto nz = static_cast<std::size_t>(n);
  const int m_count = cfg_.subbands;
  if (finished()) throw ContractViolation("step: every agent is already done");
  if (static_cast<int>(actions.size()) != n)
    throw ContractViolation("step: expected " + std::to_string(n) + " actions, got " +
                            std::to_string(actions.size()));

  std::vector<Transmission> tx(nz);
  for (int k = 0; k < n; ++k) {
    if (!active(k)) continue;
    const Action& a = actions[static_cast<std::size_t>(k)];
    if (a.subband < 0 || a.subband >= m_count || a.power_level < 0 || a.power_level >= cfg_.power_count())
      throw ContractViolation("step: action out of range for agent " + std::to_string(k));
    tx[static_cast<std::size_t>(k)] = {true, a.subband, power_mw_[static_cast<std::size_t>(a.power_level)]};
  }

  StepOutcome out;
  out.v2i_capacities.resize(static_cast<std::size_t>(m_count));
  for (int m = 0; m < m_count; ++m)
    out.v2i_capacities[static_cast<std::size_t>(m)] =
        capacity(sinr_v2i(m, tx, channel_, v2i_power_mw_, noise_mw_), cfg_.bandwidth_hz);

  out.v2v_capacities.assign(nz, 0.0);
  out.delivered_bits.assign(nz, 0.0);
  out.rewards.assign(nz, 0.0);
  out.terminal.assign(nz, Terminal::none);
  for (int k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (!tx[i].active) continue;
    const double c = capacity(sinr_v2v(k, tx, channel_, v2i_power_mw_, noise_mw_), cfg_.bandwidth_hz);
    out.v2v_capacities[i] = c;
    const double sent = std::min(load_[i], c * cfg_.slot_s());
    out.delivered_bits[i] = sent;
    load_[i] -= sent;
    budget_[i] -= 1;
    if (load_[i] <= 0.0) {
      load_[i] = 0.0;
      out.terminal[i] = Terminal::success;
    } else if (budget_[i] == 0) {
      out.terminal[i] = Terminal::failure;
    }
    const double time_frac = static_cast<double>(budget_[i]) / cfg_.budget_slots;
    out.rewards[i] = reward(cfg_.reward, out.v2i_capacities, c, time_frac, out.terminal[i]);
  }

  // What each receiver measured in this slot becomes next slot's I and B.
  const ChannelState& ch = channel_;
  std::vector<std::vector<double>> i_meas(nz), b_meas(nz);
  for (int k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    std::vector<double> power(static_cast<std::size_t>(m_count), noise_mw_);
    for (int m = 0; m < m_count; ++m) power[static_cast<std::size_t>(m)] += v2i_power_mw_ * ch.g_iv(k, m);
    for (int j = 0; j < n; ++j) {
      const auto& t = tx[static_cast<std::size_t>(j)];
      if (j == k || !t.active) continue;
      power[static_cast<std::size_t>(t.subband)] += t.power_mw * ch.g_cross(j, k, t.subband);
    }
    i_meas[i].resize(static_cast<std::size_t>(m_count));
    for (int m = 0; m < m_count; ++m) i_meas[i][static_cast<std::size_t>(m)] = mw_to_dbm(power[static_cast<std::size_t>(m)]);
    b_meas[i].assign(static_cast<std::size_t>(m_count), 0.0);
    for (int j : neighbors_[i]) {
      const auto& t = tx[static_cast<std::size_t>(j)];
      if (t.active) b_meas[i][static_cast<std::size_t>(t.subband)] += 1.0;
    }
  }

  channel_ = build_channel_state(large_, m_count, cfg_.fading, channel);
  ++slot_;

  out.next_obs.reserve(nz);
  out.done.resize(nz);
  for (int k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out.next_obs.push_back(observe(k, i_meas[i], b_meas[i]));
    out.done[i] = !active(k);
  }
  obs_ = out.next_obs;
  return out;
}

}  // namespace v2vrl
