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

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace v2vrl {

using Rng = std::mt19937_64;

// Derives the 64-bit seed of a named sub-stream.
//
// The label is hashed with 64-bit FNV-1a, xor-ed into the run seed and the
// result is passed through two rounds of the splitmix64 finalizer. Every
// concern (mobility, channel, exploration, replay sampling) draws from its own
// label so that e.g. channel realizations do not depend on how many
// exploration draws a policy made.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view label);

// A deterministic mt19937_64 stream keyed on (seed, label).
Rng rng_stream(std::uint64_t seed, std::string_view label);

// Convenience for per-episode streams: label "<label>#<index>".
Rng rng_stream(std::uint64_t seed, std::string_view label, std::uint64_t index);

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace v2vrl
