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

#include "v2vrl/channel.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <utility>

#include "v2vrl/errors.hpp"

namespace v2vrl {

double path_loss_v2v_db(double d_m) { return 44.0 + 20.0 * std::log10(std::max(d_m, kV2VClampM)); }

double path_loss_v2i_db(double d_m) {
  return 128.1 + 37.6 * std::log10(std::max(d_m, kV2IClampM) / 1000.0);
}

double sample_shadowing_db(double sigma_db, Rng& rng) {
  if (sigma_db == 0.0) return 0.0;
  std::normal_distribution<double> n(0.0, sigma_db);
  return n(rng);
}

double sample_fast_fading(Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  return e(rng);
}

LargeScale sample_large_scale(const std::vector<Vehicle>& vehicles, const std::vector<V2VLink>& links,
                              const std::vector<Vehicle>& v2i_users, Vec2 bs_position, ShadowingSigma sigma,
                              Rng& rng) {
  auto pos = [&](int id) -> Vec2 {
    auto it = std::find_if(vehicles.begin(), vehicles.end(), [id](const Vehicle& v) { return v.id == id; });
    if (it == vehicles.end()) throw ContractViolation("sample_large_scale: unknown vehicle id");
    return it->position;
  };

  LargeScale ls;
  ls.links = static_cast<int>(links.size());
  ls.v2i_users = static_cast<int>(v2i_users.size());
  const auto n = links.size();
  const auto m = v2i_users.size();

  std::vector<Vec2> tx(n), rx(n);
  for (std::size_t k = 0; k < n; ++k) {
    tx[k] = pos(links[k].tx);
    rx[k] = pos(links[k].rx);
  }

  auto v2v_gain = [&](Vec2 a, Vec2 b) {
    return db_to_linear(-path_loss_v2v_db(distance(a, b)) + sample_shadowing_db(sigma.v2v_db, rng));
  };
  auto bs_gain = [&](Vec2 a) {
    return db_to_linear(-path_loss_v2i_db(distance(a, bs_position)) + sample_shadowing_db(sigma.v2i_db, rng));
  };

  auto table = std::make_shared<std::vector<double>>(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) (*table)[j * n + k] = v2v_gain(tx[j], rx[k]);
  ls.v2v = std::move(table);
  ls.v2i_v2v.resize(m * n);
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t k = 0; k < n; ++k) ls.v2i_v2v[u * n + k] = v2v_gain(v2i_users[u].position, rx[k]);
  ls.v2v_bs.resize(n);
  for (std::size_t k = 0; k < n; ++k) ls.v2v_bs[k] = bs_gain(tx[k]);
  ls.v2i_bs.resize(m);
  for (std::size_t u = 0; u < m; ++u) ls.v2i_bs[u] = bs_gain(v2i_users[u].position);
  return ls;
}

ChannelState::ChannelState(int links, int subbands)
    : links_(links),
      subbands_(subbands),
      g_vv_(static_cast<std::size_t>(links * subbands), 0.0),
      g_cross_(static_cast<std::size_t>(links) * static_cast<std::size_t>(links) * static_cast<std::size_t>(subbands),
               0.0),
      g_vb_(static_cast<std::size_t>(links * subbands), 0.0),
      g_ib_(static_cast<std::size_t>(subbands), 0.0),
      g_iv_(static_cast<std::size_t>(links * subbands), 0.0) {}

double hashed_fast_fading(std::uint64_t key, std::uint64_t counter) {
  std::uint64_t x = key + counter * 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  // u in (0, 1], so -log(u) is finite and >= 0.
  const double u = (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
  return -std::log(u);
}

double ChannelState::cross_fading(int j, int k, int m) const {
  if (!cross_faded_) return 1.0;
  return hashed_fast_fading(slot_key_, jkm(j, k, m));
}

void ChannelState::materialize() {
  if (!lazy_cross_) return;
  std::vector<double> dense(static_cast<std::size_t>(links_) * static_cast<std::size_t>(links_) *
                            static_cast<std::size_t>(subbands_));
  for (int j = 0; j < links_; ++j)
    for (int k = 0; k < links_; ++k)
      for (int m = 0; m < subbands_; ++m) dense[jkm(j, k, m)] = std::as_const(*this).g_cross(j, k, m);
  g_cross_ = std::move(dense);
  lazy_cross_.reset();
}

double& ChannelState::g_cross(int j, int k, int m) {
  materialize();
  return g_cross_[jkm(j, k, m)];
}

bool ChannelState::all_positive() const {
  auto pos = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  };
  if (!(pos(g_vv_) && pos(g_vb_) && pos(g_ib_) && pos(g_iv_))) return false;
  for (int j = 0; j < links_; ++j)
    for (int k = 0; k < links_; ++k)
      for (int m = 0; m < subbands_; ++m)
        if (!(g_cross(j, k, m) > 0.0)) return false;
  return true;
}

std::uint64_t ChannelState::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (double x : g_vv_) mix(x);
  for (int j = 0; j < links_; ++j)
    for (int k = 0; k < links_; ++k)
      for (int m = 0; m < subbands_; ++m) mix(g_cross(j, k, m));
  for (double x : g_vb_) mix(x);
  for (double x : g_ib_) mix(x);
  for (double x : g_iv_) mix(x);
  return h;
}

bool operator==(const ChannelState& a, const ChannelState& b) {
  if (a.links_ != b.links_ || a.subbands_ != b.subbands_ || a.g_vv_ != b.g_vv_ || a.g_vb_ != b.g_vb_ ||
      a.g_ib_ != b.g_ib_ || a.g_iv_ != b.g_iv_)
    return false;
  for (int j = 0; j < a.links_; ++j)
    for (int k = 0; k < a.links_; ++k)
      for (int m = 0; m < a.subbands_; ++m)
        if (a.g_cross(j, k, m) != b.g_cross(j, k, m)) return false;
  return true;
}

ChannelState build_channel_state(const LargeScale& large, int subbands, Fading fading, Rng& rng) {
  const int n = large.links;
  if (subbands < 1 || large.v2i_users != subbands || !large.v2v || large.v2v->size() != static_cast<std::size_t>(n * n) ||
      large.v2v_bs.size() != static_cast<std::size_t>(n) ||
      large.v2i_v2v.size() != static_cast<std::size_t>(subbands * n) ||
      large.v2i_bs.size() != static_cast<std::size_t>(subbands)) {
    throw ContractViolation("build_channel_state: large-scale cache does not match links/sub-bands");
  }
  const bool rayleigh = fading == Fading::rayleigh;
  auto fade = [&]() { return rayleigh ? sample_fast_fading(rng) : 1.0; };

  ChannelState cs;
  cs.links_ = n;
  cs.subbands_ = subbands;
  const auto per_link = static_cast<std::size_t>(n * subbands);
  cs.g_vv_.resize(per_link);
  cs.g_vb_.resize(per_link);
  cs.g_iv_.resize(per_link);
  cs.g_ib_.resize(static_cast<std::size_t>(subbands));
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < subbands; ++m) cs.g_vv(k, m) = large.v2v_gain(k, k) * fade();
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < subbands; ++m) cs.g_vb(k, m) = large.v2v_bs[static_cast<std::size_t>(k)] * fade();
  for (int m = 0; m < subbands; ++m) cs.g_ib(m) = large.v2i_bs[static_cast<std::size_t>(m)] * fade();
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < subbands; ++m) cs.g_iv(k, m) = large.v2i_v2v_gain(m, k) * fade();
  cs.lazy_cross_ = large.v2v;
  cs.cross_faded_ = rayleigh;
  cs.slot_key_ = rayleigh ? rng() : 0;
  return cs;
}

}  // namespace v2vrl
