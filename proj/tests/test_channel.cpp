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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "v2vrl/channel.hpp"
#include "v2vrl/errors.hpp"

namespace v2vrl {
namespace {

TEST(PathLoss, V2VClampAndValues) {
  const double at3 = 44.0 + 20.0 * std::log10(3.0);
  EXPECT_NEAR(path_loss_v2v_db(1.0), 53.54, 5e-3);
  EXPECT_DOUBLE_EQ(path_loss_v2v_db(1.0), at3);
  EXPECT_DOUBLE_EQ(path_loss_v2v_db(3.0), at3);
  EXPECT_NEAR(path_loss_v2v_db(300.0), 93.54, 5e-3);
}

TEST(PathLoss, V2IClampAndValues) {
  EXPECT_DOUBLE_EQ(path_loss_v2i_db(1000.0), 128.1);
  EXPECT_NEAR(path_loss_v2i_db(100.0), 90.5, 1e-12);
  EXPECT_DOUBLE_EQ(path_loss_v2i_db(5.0), path_loss_v2i_db(10.0));
}

TEST(PathLoss, GainStrictlyDecreasesWithDistance) {
  for (double d = 3.0; d < 5000.0; d *= 1.07) {
    EXPECT_LT(db_to_linear(-path_loss_v2v_db(d * 1.07)), db_to_linear(-path_loss_v2v_db(d)));
  }
  for (double d = 10.0; d < 5000.0; d *= 1.07) {
    EXPECT_LT(db_to_linear(-path_loss_v2i_db(d * 1.07)), db_to_linear(-path_loss_v2i_db(d)));
  }
}

TEST(DbConversion, RoundTrip) {
  for (double x = -200.0; x <= 0.0; x += 0.37) EXPECT_NEAR(linear_to_db(db_to_linear(x)), x, 1e-12);
}

TEST(Shadowing, ZeroSigmaIsZeroAndConsumesNothing) {
  Rng a = rng_stream(1, "s"), b = rng_stream(1, "s");
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_shadowing_db(0.0, a), 0.0);
  EXPECT_EQ(a(), b());
}

TEST(Shadowing, SampleMomentsMatchSigma) {
  Rng rng = rng_stream(3, "shadow");
  constexpr int n = 100000;
  double s = 0, ss = 0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_shadowing_db(8.0, rng);
    s += x;
    ss += x * x;
  }
  const double mean = s / n;
  const double sd = std::sqrt(ss / n - mean * mean);
  EXPECT_GE(sd, 7.9);
  EXPECT_LE(sd, 8.1);

  s = 0;
  for (int i = 0; i < n; ++i) s += sample_shadowing_db(3.0, rng);
  EXPECT_GE(s / n, -0.05);
  EXPECT_LE(s / n, 0.05);
}

TEST(FastFading, ExponentialMomentsAndMedian) {
  Rng rng = rng_stream(5, "fading");
  constexpr int n = 1000000;
  std::vector<double> v(n);
  double s = 0;
  for (auto& x : v) {
    x = sample_fast_fading(rng);
    ASSERT_GE(x, 0.0);
    s += x;
  }
  EXPECT_GE(s / n, 0.995);
  EXPECT_LE(s / n, 1.005);
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  EXPECT_NEAR(v[n / 2], std::log(2.0), 5e-3);
}

TEST(FastFading, HashedDrawIsUnitMeanExponential) {
  constexpr int n = 1000000;
  double s = 0, ss = 0;
  for (std::uint64_t c = 0; c < n; ++c) {
    const double x = hashed_fast_fading(0x1234, c);
    ASSERT_GT(x, 0.0);
    s += x;
    ss += x * x;
  }
  EXPECT_NEAR(s / n, 1.0, 0.005);
  EXPECT_NEAR(ss / n, 2.0, 0.03);  // E[X^2] = 2 for Exp(1)
}

struct Scene {
  std::vector<Vehicle> vehicles;
  std::vector<V2VLink> links;
  std::vector<Vehicle> users;
  Vec2 bs{0.0, 0.0};
};

Scene line_scene() {
  Scene s;
  s.vehicles = {{0, {100.0, 0.0}}, {1, {130.0, 0.0}}, {2, {400.0, 0.0}}};
  s.links = form_links(s.vehicles);
  s.users = {{3, {1000.0, 0.0}}, {4, {50.0, 0.0}}};
  return s;
}

TEST(LargeScale, ZeroShadowingGivesPathLossGains) {
  const Scene s = line_scene();
  Rng rng = rng_stream(1, "channel");
  const LargeScale ls = sample_large_scale(s.vehicles, s.links, s.users, s.bs, {0.0, 0.0}, rng);
  EXPECT_EQ(ls.links, 3);
  EXPECT_EQ(ls.v2i_users, 2);
  EXPECT_NEAR(ls.v2i_bs[0] / std::pow(10.0, -12.81), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(ls.v2v_gain(0, 0), db_to_linear(-path_loss_v2v_db(30.0)));
  // Transmitter 2 (at 400) into the receiver of link 0 (vehicle 1 at 130).
  EXPECT_DOUBLE_EQ(ls.v2v_gain(2, 0), db_to_linear(-path_loss_v2v_db(270.0)));
  EXPECT_DOUBLE_EQ(ls.v2v_bs[2], db_to_linear(-path_loss_v2i_db(400.0)));
  EXPECT_DOUBLE_EQ(ls.v2i_v2v_gain(1, 0), db_to_linear(-path_loss_v2v_db(80.0)));
}

TEST(ChannelState, FrozenFadingEqualsLargeScaleAndConsumesNothing) {
  const Scene s = line_scene();
  Rng rng = rng_stream(1, "channel");
  const LargeScale ls = sample_large_scale(s.vehicles, s.links, s.users, s.bs, {0.0, 0.0}, rng);
  Rng a = rng_stream(2, "slot"), b = rng_stream(2, "slot");
  const ChannelState ch = build_channel_state(ls, 2, Fading::frozen, a);
  EXPECT_EQ(a(), b());
  EXPECT_NEAR(ch.g_ib(0) / std::pow(10.0, -12.81), 1.0, 1e-12);
  for (int m = 0; m < 2; ++m)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(ch.g_cross(j, k, m), ls.v2v_gain(j, k));
}

TEST(ChannelState, SameSlotSeedGivesIdenticalTables) {
  Rng mob = rng_stream(8, "mobility");
  const auto v = spawn_vehicles(30, Layout{}, mob);
  const auto links = form_links(v);
  const auto users = drop_on_lanes(4, Layout{}, mob, 30);
  Rng rng = rng_stream(8, "channel");
  const LargeScale ls = sample_large_scale(v, links, users, Layout{}.center(), {}, rng);
  Rng a = rng_stream(9, "slot"), b = rng_stream(9, "slot");
  const ChannelState x = build_channel_state(ls, 4, Fading::rayleigh, a);
  const ChannelState y = build_channel_state(ls, 4, Fading::rayleigh, b);
  EXPECT_TRUE(x == y);
  EXPECT_EQ(x.checksum(), y.checksum());
  EXPECT_TRUE(x.all_positive());
  Rng c = rng_stream(10, "slot");
  EXPECT_NE(build_channel_state(ls, 4, Fading::rayleigh, c).checksum(), x.checksum());
}

TEST(ChannelState, LazyAndMaterializedCrossTablesAgree) {
  Rng mob = rng_stream(3, "mobility");
  const auto v = spawn_vehicles(12, Layout{}, mob);
  const auto users = drop_on_lanes(3, Layout{}, mob, 12);
  Rng rng = rng_stream(3, "channel");
  const LargeScale ls = sample_large_scale(v, form_links(v), users, Layout{}.center(), {}, rng);
  Rng slot = rng_stream(3, "slot");
  const ChannelState lazy = build_channel_state(ls, 3, Fading::rayleigh, slot);
  ChannelState dense = lazy;
  const double before = std::as_const(dense).g_cross(1, 2, 0);
  dense.g_cross(0, 0, 0) = dense.g_cross(0, 0, 0);  // forces the stored table
  EXPECT_EQ(std::as_const(dense).g_cross(1, 2, 0), before);
  for (int j = 0; j < 12; ++j)
    for (int k = 0; k < 12; ++k)
      for (int m = 0; m < 3; ++m) ASSERT_EQ(std::as_const(dense).g_cross(j, k, m), lazy.g_cross(j, k, m));
  EXPECT_EQ(dense.checksum(), lazy.checksum());
}

TEST(ChannelState, RejectsMismatchedUserCount) {
  const Scene s = line_scene();
  Rng rng = rng_stream(1, "channel");
  const LargeScale ls = sample_large_scale(s.vehicles, s.links, s.users, s.bs, {}, rng);
  EXPECT_THROW(build_channel_state(ls, 4, Fading::rayleigh, rng), ContractViolation);
}

// Large-scale gains are fixed for the episode; averaging many slots recovers
// them (unit-mean fading), within 1%.
TEST(ChannelState, SlotAverageRecoversLargeScale) {
  const Scene s = line_scene();
  Rng rng = rng_stream(6, "channel");
  const LargeScale ls = sample_large_scale(s.vehicles, s.links, s.users, s.bs, {}, rng);
  constexpr int slots = 100000;
  double vv = 0, cross = 0, ib = 0;
  for (int t = 0; t < slots; ++t) {
    const ChannelState ch = build_channel_state(ls, 2, Fading::rayleigh, rng);
    vv += ch.g_vv(0, 1);
    cross += ch.g_cross(2, 0, 0);
    ib += ch.g_ib(1);
  }
  EXPECT_NEAR(vv / slots / ls.v2v_gain(0, 0), 1.0, 0.01);
  EXPECT_NEAR(cross / slots / ls.v2v_gain(2, 0), 1.0, 0.01);
  EXPECT_NEAR(ib / slots / ls.v2i_bs[1], 1.0, 0.01);
}

}  // namespace
}  // namespace v2vrl
