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

#include "v2vrl/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "v2vrl/errors.hpp"

namespace v2vrl {

double Layout::width() const {
  return kind == LayoutKind::manhattan ? blocks_x * block_w_m : highway_len_m;
}

double Layout::height() const {
  return kind == LayoutKind::manhattan ? blocks_y * block_h_m : 0.0;
}

double Layout::total_lane_length() const {
  if (kind == LayoutKind::highway) return highway_len_m;
  return (blocks_x + 1) * height() + (blocks_y + 1) * width();
}

bool Layout::in_region(Vec2 p, double tol) const {
  return p.x >= -tol && p.x <= width() + tol && p.y >= -tol && p.y <= height() + tol;
}

bool Layout::on_lane(Vec2 p, double tol) const {
  if (!in_region(p, tol)) return false;
  if (kind == LayoutKind::highway) return std::abs(p.y) <= tol;
  const double vx = std::round(p.x / block_w_m) * block_w_m;
  const double hy = std::round(p.y / block_h_m) * block_h_m;
  return std::abs(p.x - vx) <= tol || std::abs(p.y - hy) <= tol;
}

void Layout::validate() const {
  if (kind == LayoutKind::manhattan) {
    if (blocks_x < 1) throw ConfigError("blocks_x must be >= 1");
    if (blocks_y < 1) throw ConfigError("blocks_y must be >= 1");
    if (!(block_w_m > 0.0)) throw ConfigError("block_w_m must be > 0");
    if (!(block_h_m > 0.0)) throw ConfigError("block_h_m must be > 0");
  } else if (!(highway_len_m > 0.0)) {
    throw ConfigError("highway_len_m must be > 0");
  }
}

namespace {

// Maps an arc-length offset in [0, total_lane_length) to a point and axis.
void place_on_lane(const Layout& layout, double s, Vec2& pos, bool& vertical) {
  if (layout.kind == LayoutKind::highway) {
    pos = {std::min(s, layout.highway_len_m), 0.0};
    vertical = false;
    return;
  }
  const double h = layout.height();
  const double w = layout.width();
  const double vertical_total = (layout.blocks_x + 1) * h;
  if (s < vertical_total) {
    const int street = std::min(static_cast<int>(s / h), layout.blocks_x);
    pos = {street * layout.block_w_m, std::min(s - street * h, h)};
    vertical = true;
  } else {
    s -= vertical_total;
    const int street = std::min(static_cast<int>(s / w), layout.blocks_y);
    pos = {std::min(s - street * w, w), street * layout.block_h_m};
    vertical = false;
  }
}

// Grid index of coordinate c if it sits on a grid line, else -1.
int grid_index(double c, double spacing) {
  const double k = c / spacing;
  const double kr = std::round(k);
  return std::abs(k - kr) < 1e-9 ? static_cast<int>(kr) : -1;
}

// Picks the outgoing street at the intersection the vehicle is standing on.
void turn_at_intersection(Vehicle& v, const Layout& layout) {
  const int ix = static_cast<int>(std::lround(v.position.x / layout.block_w_m));
  const int iy = static_cast<int>(std::lround(v.position.y / layout.block_h_m));
  v.position = {ix * layout.block_w_m, iy * layout.block_h_m};

  std::vector<Vec2> options;
  const Vec2 back{-v.heading.x, -v.heading.y};
  auto consider = [&](Vec2 h, bool ok) {
    if (ok && !(h == back)) options.push_back(h);
  };
  consider({1.0, 0.0}, ix < layout.blocks_x);
  consider({-1.0, 0.0}, ix > 0);
  consider({0.0, 1.0}, iy < layout.blocks_y);
  consider({0.0, -1.0}, iy > 0);
  if (options.empty()) options.push_back(back);
  v.heading = options[static_cast<std::size_t>(v.id + ix + iy) % options.size()];
}

Vehicle advance_manhattan(Vehicle v, double remaining, const Layout& layout) {
  while (remaining > 0.0) {
    const bool along_x = v.heading.x != 0.0;
    const double dir = along_x ? v.heading.x : v.heading.y;
    const double spacing = along_x ? layout.block_w_m : layout.block_h_m;
    const double limit = along_x ? layout.width() : layout.height();
    double& c = along_x ? v.position.x : v.position.y;

    const int at = grid_index(c, spacing);
    double next;
    if (dir > 0.0) {
      next = (at >= 0 ? at + 1 : std::floor(c / spacing) + 1) * spacing;
    } else {
      next = (at >= 0 ? at - 1 : std::ceil(c / spacing) - 1) * spacing;
    }
    if (next < -1e-9 || next > limit + 1e-9) {
      // Standing on the region boundary facing outward.
      turn_at_intersection(v, layout);
      continue;
    }
    const double gap = std::abs(next - c);
    if (remaining < gap) {
      c += dir * remaining;
      break;
    }
    c = next;
    remaining -= gap;
    turn_at_intersection(v, layout);
  }
  return v;
}

}  // namespace

std::vector<Vehicle> drop_on_lanes(int n, const Layout& layout, Rng& rng, int first_id) {
  layout.validate();
  std::uniform_real_distribution<double> speed(kMinSpeedMps, kMaxSpeedMps);
  const double total = layout.total_lane_length();
  std::vector<Vehicle> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    Vehicle v;
    v.id = first_id + i;
    bool vertical = false;
    place_on_lane(layout, uniform01(rng) * total, v.position, vertical);
    const double sign = uniform01(rng) < 0.5 ? 1.0 : -1.0;
    v.heading = vertical ? Vec2{0.0, sign} : Vec2{sign, 0.0};
    v.speed_mps = speed(rng);
    out.push_back(v);
  }
  return out;
}

std::vector<Vehicle> spawn_vehicles(int n, const Layout& layout, Rng& rng) {
  if (n < 2) throw ConfigError("n_vehicles: need at least one V2V pair (got " + std::to_string(n) + ")");
  return drop_on_lanes(n, layout, rng, 0);
}

std::vector<Vehicle> step_positions(std::vector<Vehicle> vehicles, double dt, const Layout& layout) {
  if (!(dt > 0.0)) throw ContractViolation("step_positions: dt must be > 0");
  for (auto& v : vehicles) {
    const double travel = v.speed_mps * dt;
    if (layout.kind == LayoutKind::highway) {
      double x = v.position.x + v.heading.x * travel;
      x = std::fmod(x, layout.highway_len_m);
      if (x < 0.0) x += layout.highway_len_m;
      v.position.x = x;
    } else {
      v = advance_manhattan(v, travel, layout);
    }
  }
  return vehicles;
}

std::vector<V2VLink> form_links(const std::vector<Vehicle>& vehicles) {
  if (vehicles.size() < 2) throw ConfigError("n_vehicles: need at least one V2V pair");
  std::vector<V2VLink> links;
  links.reserve(vehicles.size());
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    double best_d2 = std::numeric_limits<double>::infinity();
    int best_id = std::numeric_limits<int>::max();
    for (std::size_t j = 0; j < vehicles.size(); ++j) {
      if (j == i) continue;
      const double dx = vehicles[i].position.x - vehicles[j].position.x;
      const double dy = vehicles[i].position.y - vehicles[j].position.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2 || (d2 == best_d2 && vehicles[j].id < best_id)) {
        best_d2 = d2;
        best_id = vehicles[j].id;
      }
    }
    links.push_back({static_cast<int>(i), vehicles[i].id, best_id});
  }
  return links;
}

}  // namespace v2vrl
