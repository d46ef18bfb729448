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

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "v2vrl/geometry.hpp"
#include "v2vrl/rng.hpp"

namespace v2vrl {

inline constexpr double kV2VClampM = 3.0;
inline constexpr double kV2IClampM = 10.0;

// 44.0 + 20 log10(max(d, 3 m)) dB.
double path_loss_v2v_db(double d_m);
// 128.1 + 37.6 log10(max(d, 10 m) / 1 km) dB.
double path_loss_v2i_db(double d_m);

double sample_shadowing_db(double sigma_db, Rng& rng);
// Rayleigh amplitude, so the power factor is Exp(1).
double sample_fast_fading(Rng& rng);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

enum class Fading { rayleigh, frozen };

struct ShadowingSigma {
  double v2v_db = 3.0;
  double v2i_db = 8.0;

  friend bool operator==(const ShadowingSigma&, const ShadowingSigma&) = default;
};

// Per-episode large-scale gains (-path loss + shadowing), kept in linear
// scale. N links, M V2I users (user m owns sub-band m).
struct LargeScale {
  int links = 0;
  int v2i_users = 0;
  // [tx link j][rx of link k], N x N; diagonal is the desired link. Shared
  // with the slot channel states built from it.
  std::shared_ptr<const std::vector<double>> v2v = std::make_shared<const std::vector<double>>();
  std::vector<double> v2i_v2v;  // [V2I user m][rx of link k], M x N
  std::vector<double> v2v_bs;   // [tx link k], N
  std::vector<double> v2i_bs;   // [V2I user m], M

  double v2v_gain(int tx_link, int rx_link) const { return (*v2v)[idx(tx_link, rx_link, links)]; }
  double v2i_v2v_gain(int user, int rx_link) const { return v2i_v2v[idx(user, rx_link, links)]; }

 private:
  static std::size_t idx(int a, int b, int cols) {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(b);
  }
};

// Distances come from vehicle positions: link k's transmitter is
// links[k].tx and its receiver links[k].rx (vehicle ids indexing `vehicles`).
LargeScale sample_large_scale(const std::vector<Vehicle>& vehicles, const std::vector<V2VLink>& links,
                              const std::vector<Vehicle>& v2i_users, Vec2 bs_position, ShadowingSigma sigma,
                              Rng& rng);

// Instantaneous linear power gains for one slot.
//
// The per-link tables (g_vv, g_vb, g_ib, g_iv) are stored. The N x N x M
// cross table is either stored (constructed by hand, or after any write
// through the mutable accessor) or evaluated on demand: the large-scale gain
// times an Exp(1) factor derived from a counter-based hash of
// (slot key, tx, rx, band). Both forms expose identical values.
class ChannelState {
 public:
  ChannelState() = default;
  // Dense tables, all zero.
  ChannelState(int links, int subbands);

  int links() const { return links_; }
  int subbands() const { return subbands_; }

  // V2V desired link k on band m.
  double& g_vv(int k, int m) { return g_vv_[km(k, m)]; }
  double g_vv(int k, int m) const { return g_vv_[km(k, m)]; }
  // V2V transmitter j into the receiver of link k on band m (j == k: desired).
  double& g_cross(int j, int k, int m);
  double g_cross(int j, int k, int m) const {
    if (!lazy_cross_) return g_cross_[jkm(j, k, m)];
    if (j == k) return g_vv(k, m);
    return (*lazy_cross_)[static_cast<std::size_t>(j) * static_cast<std::size_t>(links_) + static_cast<std::size_t>(k)] *
           cross_fading(j, k, m);
  }
  // V2V transmitter k to the base station on band m.
  double& g_vb(int k, int m) { return g_vb_[km(k, m)]; }
  double g_vb(int k, int m) const { return g_vb_[km(k, m)]; }
  // V2I user of band m to the base station.
  double& g_ib(int m) { return g_ib_[static_cast<std::size_t>(m)]; }
  double g_ib(int m) const { return g_ib_[static_cast<std::size_t>(m)]; }
  // V2I user of band m into the receiver of link k.
  double& g_iv(int k, int m) { return g_iv_[km(k, m)]; }
  double g_iv(int k, int m) const { return g_iv_[km(k, m)]; }

  bool all_positive() const;
  // FNV-1a over every gain in a fixed order.
  std::uint64_t checksum() const;

  friend bool operator==(const ChannelState& a, const ChannelState& b);

 private:
  friend ChannelState build_channel_state(const LargeScale&, int, Fading, Rng&);

  std::size_t km(int k, int m) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(subbands_) + static_cast<std::size_t>(m);
  }
  std::size_t jkm(int j, int k, int m) const {
    return (static_cast<std::size_t>(j) * static_cast<std::size_t>(links_) + static_cast<std::size_t>(k)) *
               static_cast<std::size_t>(subbands_) +
           static_cast<std::size_t>(m);
  }
  double cross_fading(int j, int k, int m) const;
  void materialize();

  int links_ = 0;
  int subbands_ = 0;
  std::vector<double> g_vv_;
  std::vector<double> g_cross_;
  std::vector<double> g_vb_;
  std::vector<double> g_ib_;
  std::vector<double> g_iv_;
  // Lazy cross table: shared large-scale gains plus the slot's fading key.
  std::shared_ptr<const std::vector<double>> lazy_cross_;
  bool cross_faded_ = false;
  std::uint64_t slot_key_ = 0;
};

// Exp(1) sample from a 64-bit counter hash; the fading law used for the
// cross table.
double hashed_fast_fading(std::uint64_t key, std::uint64_t counter);

// Large-scale gain times an independent Exp(1) factor per (link, sub-band).
// With Fading::frozen every factor is 1 and `rng` is not touched.
// Throws ContractViolation when the cache does not match `subbands` V2I users.
ChannelState build_channel_state(const LargeScale& large, int subbands, Fading fading, Rng& rng);

}  // namespace v2vrl
