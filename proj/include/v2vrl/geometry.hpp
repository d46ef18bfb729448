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
#include <vector>

#include "v2vrl/rng.hpp"

namespace v2vrl {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class LayoutKind { manhattan, highway };

// Road layout. A Manhattan grid has (blocks_x + 1) vertical and
// (blocks_y + 1) horizontal streets; every street carries traffic in both
// directions on its centerline. The highway is one straight road along +x
// starting at the origin.
struct Layout {
  LayoutKind kind = LayoutKind::manhattan;
  int blocks_x = 3;
  int blocks_y = 3;
  double block_w_m = 250.0;
  double block_h_m = 433.0;
  double highway_len_m = 1000.0;

  double width() const;
  double height() const;
  Vec2 center() const { return {width() / 2.0, height() / 2.0}; }
  double total_lane_length() const;
  bool in_region(Vec2 p, double tol = 1e-9) const;
  bool on_lane(Vec2 p, double tol = 1e-6) const;
  void validate() const;

  friend bool operator==(const Layout&, const Layout&) = default;
};

struct Vehicle {
  int id = 0;
  Vec2 position;
  double speed_mps = 0.0;
  Vec2 heading{1.0, 0.0};

  friend bool operator==(const Vehicle&, const Vehicle&) = default;
};

struct V2VLink {
  int link_id = 0;
  int tx = 0;
  int rx = 0;

  friend bool operator==(const V2VLink&, const V2VLink&) = default;
};

inline constexpr double kMinSpeedMps = 10.0;
inline constexpr double kMaxSpeedMps = 15.0;

// Drops n vehicles uniformly along the lane centerlines (ids first_id ..
// first_id + n - 1) with lane-aligned headings and speeds in [10, 15] m/s.
// Throws ConfigError when n < 2.
std::vector<Vehicle> spawn_vehicles(int n, const Layout& layout, Rng& rng);

// Same drop without the pairing precondition; used for V2I users.
std::vector<Vehicle> drop_on_lanes(int n, const Layout& layout, Rng& rng, int first_id = 0);

// Advances every vehicle by speed * dt along its heading. On the grid a
// vehicle reaching an intersection turns onto one of the admissible streets
// (never out of the region, U-turns only at dead ends); the branch is a
// deterministic function of the vehicle id and the intersection. Highway
// traffic wraps around at the ends.
std::vector<Vehicle> step_positions(std::vector<Vehicle> vehicles, double dt, const Layout& layout);

// Pairs every vehicle with its nearest other vehicle (lowest id on ties).
// Link i has vehicles[i] as transmitter.
std::vector<V2VLink> form_links(const std::vector<Vehicle>& vehicles);

}  // namespace v2vrl
