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

#include <cstddef>
#include <optional>
#include <vector>

#include "v2vrl/rng.hpp"

namespace v2vrl {

struct Transition {
  std::vector<double> s;
  int a = 0;
  double r = 0.0;
  std::vector<double> s_next;
  bool terminal = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Bounded FIFO of transitions with uniform mini-batch sampling.
class ReplayMemory {
 public:
  ReplayMemory(std::size_t capacity, int observation_dim, int action_count);

  // Evicts the oldest transition when full. Throws ContractViolation when the
  // vector lengths or the action index do not fit.
  void push(Transition t);

  // `batch` distinct stored transitions, uniformly at random, in draw order.
  // nullopt when fewer than `batch` are stored.
  std::optional<std::vector<Transition>> sample(std::size_t batch, Rng& rng) const;
  // The same draw as sample(), as ages (0 = oldest stored).
  std::optional<std::vector<std::size_t>> sample_ages(std::size_t batch, Rng& rng) const;

  // Transition by age, 0 = oldest.
  const Transition& at_age(std::size_t age) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }

 private:
  std::size_t capacity_;
  int observation_dim_;
  int action_count_;
  std::vector<Transition> buffer_;
  std::size_t head_ = 0;  // slot the next push writes
  std::size_t size_ = 0;
};

}  // namespace v2vrl
