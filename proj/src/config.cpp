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

#include "v2vrl/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "v2vrl/errors.hpp"

namespace v2vrl {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view what) {
  throw ConfigError(std::string(key) + ": " + std::string(what));
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) bad(key, "expected a number, got '" + std::string(v) + "'");
  return out;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view v) {
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<T> out;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) out.push_back(parse_number<T>(key, token));
    token.clear();
  };
  for (char c : v) {
    if (c == ',' || c == ' ' || c == '\t') {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  return out;
}

std::string parse_string(std::string_view v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  return std::string(v);
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename T>
std::string fmt_list(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt_double(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

struct Key {
  const char* name;
  std::function<void(SimConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const SimConfig&)> get;
};

#define V2VRL_INT(NAME, FIELD)                                                                           \
  Key {                                                                                                  \
    NAME, [](SimConfig& c, std::string_view k, std::string_view v) { c.FIELD = parse_number<int>(k, v); }, \
        [](const SimConfig& c) { return std::to_string(c.FIELD); }                                       \
  }
#define V2VRL_DOUBLE(NAME, FIELD)                                                                          \
  Key {                                                                                                    \
    NAME, [](SimConfig& c, std::string_view k, std::string_view v) { c.FIELD = parse_number<double>(k, v); }, \
        [](const SimConfig& c) { return fmt_double(c.FIELD); }                                             \
  }

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = {
      Key{"layout",
          [](SimConfig& c, std::string_view k, std::string_view v) {
            const auto s = parse_string(v);
            if (s == "manhattan") {
              c.env.layout.kind = LayoutKind::manhattan;
            } else if (s == "highway") {
              c.env.layout.kind = LayoutKind::highway;
            } else {
              bad(k, "expected \"manhattan\" or \"highway\", got '" + s + "'");
            }
          },
          [](const SimConfig& c) {
            return std::string(c.env.layout.kind == LayoutKind::manhattan ? "\"manhattan\"" : "\"highway\"");
          }},
      V2VRL_INT("blocks_x", env.layout.blocks_x),
      V2VRL_INT("blocks_y", env.layout.blocks_y),
      V2VRL_DOUBLE("block_w_m", env.layout.block_w_m),
      V2VRL_DOUBLE("block_h_m", env.layout.block_h_m),
      V2VRL_DOUBLE("highway_len_m", env.layout.highway_len_m),
      V2VRL_INT("n_vehicles", env.n_vehicles),
      V2VRL_DOUBLE("shadow_sigma_v2v_db", env.shadow.v2v_db),
      V2VRL_DOUBLE("shadow_sigma_v2i_db", env.shadow.v2i_db),
      V2VRL_DOUBLE("noise_dbm", env.noise_dbm),
      V2VRL_DOUBLE("bandwidth_hz_per_subband", env.bandwidth_hz),
      Key{"fading",
          [](SimConfig& c, std::string_view k, std::string_view v) {
            const auto s = parse_string(v);
            if (s == "rayleigh") {
              c.env.fading = Fading::rayleigh;
            } else if (s == "frozen") {
              c.env.fading = Fading::frozen;
            } else {
              bad(k, "expected \"rayleigh\" or \"frozen\", got '" + s + "'");
            }
          },
          [](const SimConfig& c) {
            return std::string(c.env.fading == Fading::rayleigh ? "\"rayleigh\"" : "\"frozen\"");
          }},
      V2VRL_INT("subbands", env.subbands),
      Key{"power_levels_dbm",
          [](SimConfig& c, std::string_view k, std::string_view v) { c.env.power_levels_dbm = parse_list<double>(k, v); },
          [](const SimConfig& c) { return fmt_list(c.env.power_levels_dbm); }},
      V2VRL_DOUBLE("v2i_power_dbm", env.v2i_power_dbm),
      V2VRL_DOUBLE("slot_ms", env.slot_ms),
      V2VRL_INT("budget_slots", env.budget_slots),
      V2VRL_DOUBLE("payload_bits", env.payload_bits),
      V2VRL_DOUBLE("c_ref_bps", env.reward.c_ref_bps),
      V2VRL_DOUBLE("w_i", env.reward.w_i),
      V2VRL_DOUBLE("w_v", env.reward.w_v),
      V2VRL_DOUBLE("w_t", env.reward.w_t),
      V2VRL_DOUBLE("r_success", env.reward.r_success),
      V2VRL_DOUBLE("r_fail", env.reward.r_fail),
      V2VRL_INT("neighbors", env.neighbors),
      V2VRL_INT("episodes", trainer.episodes),
      V2VRL_DOUBLE("gamma", trainer.gamma),
      V2VRL_DOUBLE("eps_start", trainer.eps_start),
      V2VRL_DOUBLE("eps_end", trainer.eps_end),
      V2VRL_DOUBLE("eps_anneal_frac", trainer.eps_anneal_frac),
      V2VRL_INT("target_sync_steps", trainer.target_sync_steps),
      V2VRL_DOUBLE("lr", trainer.lr),
      V2VRL_INT("batch", trainer.batch),
      V2VRL_INT("replay_capacity", trainer.replay_capacity),
      Key{"hidden_sizes",
          [](SimConfig& c, std::string_view k, std::string_view v) { c.trainer.hidden = parse_list<int>(k, v); },
          [](const SimConfig& c) { return fmt_list(c.trainer.hidden); }},
      Key{"seed", [](SimConfig& c, std::string_view k, std::string_view v) { c.seed = parse_number<std::uint64_t>(k, v); },
          [](const SimConfig& c) { return std::to_string(c.seed); }},
      V2VRL_INT("eval_episodes", eval_episodes),
      Key{"output_path", [](SimConfig& c, std::string_view, std::string_view v) { c.output_path = parse_string(v); },
          [](const SimConfig& c) { return "\"" + c.output_path + "\""; }},
  };
  return keys;
}

#undef V2VRL_INT
#undef V2VRL_DOUBLE

void validate(const SimConfig& c) {
  c.env.validate();
  c.trainer.validate();
  if (c.eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (c.output_path.empty()) throw ConfigError("output_path must not be empty");
}

}  // namespace

SimConfig parse_config(std::string_view text) {
  SimConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto& keys = registry();
    auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) { return key == k.name; });
    if (it == keys.end()) bad(key, "unknown key");
    if (!seen.insert(std::string(key)).second) bad(key, "given more than once");
    it->set(cfg, key, value);
  }
  validate(cfg);
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const SimConfig& cfg) {
  std::string out;
  for (const auto& k : registry()) {
    out += k.name;
    out += " = ";
    out += k.get(cfg);
    out += '\n';
  }
  return out;
}

void save_config(const SimConfig& cfg, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << format_config(cfg);
}

}  // namespace v2vrl
