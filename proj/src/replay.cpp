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

#include "v2vrl/replay.hpp"

#include <algorithm>

#include "v2vrl/errors.hpp"

namespace v2vrl {

ReplayMemory::ReplayMemory(std::size_t capacity, int observation_dim, int action_count)
    : capacity_(capacity), observation_dim_(observation_dim), action_count_(action_count) {
  if (capacity_ == 0) throw ContractViolation("ReplayMemory: capacity must be > 0");
  buffer_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayMemory::push(Transition t) {
  if (static_cast<int>(t.s.size()) != observation_dim_ || static_cast<int>(t.s_next.size()) != observation_dim_)
    throw ContractViolation("ReplayMemory::push: observation length mismatch");
  if (t.a < 0 || t.a >= action_count_) throw ContractViolation("ReplayMemory::push: action index out of range");
  if (buffer_.size() < capacity_) {
    buffer_.push_back(std::move(t));
  } else {
    buffer_[head_] = std::move(t);
  }
  head_ = (head_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

const Transition& ReplayMemory::at_age(std::size_t age) const {
  if (age >= size_) throw ContractViolation("ReplayMemory::at_age: out of range");
  const std::size_t oldest = size_ < capacity_ ? 0 : head_;
  return buffer_[(oldest + age) % capacity_];
}

std::optional<std::vector<std::size_t>> ReplayMemory::sample_ages(std::size_t batch, Rng& rng) const {
  if (size_ < batch) return std::nullopt;
  std::vector<std::size_t> picked;
  picked.reserve(batch);
  if (batch * 4 > size_) {
    // Dense draw: partial Fisher-Yates over all ages.
    std::vector<std::size_t> ages(size_);
    for (std::size_t i = 0; i < size_; ++i) ages[i] = i;
    for (std::size_t i = 0; i < batch; ++i) {
      std::uniform_int_distribution<std::size_t> d(i, size_ - 1);
      std::swap(ages[i], ages[d(rng)]);
      picked.push_back(ages[i]);
    }
    return picked;
  }
  // Sparse draw: rejection against the (short) batch so far.
  std::uniform_int_distribution<std::size_t> d(0, size_ - 1);
  while (picked.size() < batch) {
    const std::size_t a = d(rng);
    if (std::find(picked.begin(), picked.end(), a) == picked.end()) picked.push_back(a);
  }
  return picked;
}

std::optional<std::vector<Transition>> ReplayMemory::sample(std::size_t batch, Rng& rng) const {
  auto ages = sample_ages(batch, rng);
  if (!ages) return std::nullopt;
  std::vector<Transition> out;
  out.reserve(batch);
  for (std::size_t a : *ages) out.push_back(at_age(a));
  return out;
}

}  // namespace v2vrl
