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

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdlib>
#include <set>
#include <vector>

#include "v2vrl/errors.hpp"
#include "v2vrl/replay.hpp"

namespace v2vrl {
namespace {

// Transition whose reward tags its insertion order.
Transition item(int tag) { return {{static_cast<double>(tag), 0.0}, tag % 3, static_cast<double>(tag), {0.0, 1.0}, false}; }

ReplayMemory filled(std::size_t capacity, int count) {
  ReplayMemory m(capacity, 2, 3);
  for (int i = 1; i <= count; ++i) m.push(item(i));
  return m;
}

TEST(Replay, FifoEviction) {
  ReplayMemory m = filled(2, 3);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.at_age(0).r, 2.0);
  EXPECT_EQ(m.at_age(1).r, 3.0);
}

TEST(Replay, FirstPushGivesSizeOne) {
  ReplayMemory m(10, 2, 3);
  EXPECT_TRUE(m.empty());
  m.push(item(1));
  EXPECT_EQ(m.size(), 1u);
}

TEST(Replay, SizeSaturatesAtCapacity) {
  ReplayMemory m(50, 2, 3);
  for (int i = 1; i <= 500; ++i) {
    m.push(item(i));
    ASSERT_EQ(m.size(), std::min<std::size_t>(static_cast<std::size_t>(i), 50u));
  }
  EXPECT_EQ(m.at_age(0).r, 451.0);
  EXPECT_EQ(m.at_age(49).r, 500.0);
}

TEST(Replay, RejectsMalformedTransitions) {
  ReplayMemory m(4, 2, 3);
  EXPECT_THROW(m.push({{1.0}, 0, 0.0, {0.0, 0.0}, false}), ContractViolation);
  EXPECT_THROW(m.push({{1.0, 2.0}, 3, 0.0, {0.0, 0.0}, false}), ContractViolation);
  EXPECT_THROW(m.push({{1.0, 2.0}, 0, 0.0, {0.0}, false}), ContractViolation);
  EXPECT_THROW(m.at_age(0), ContractViolation);
}

TEST(Replay, FullBatchReturnsEveryItemOnce) {
  ReplayMemory m = filled(16, 16);
  Rng rng = rng_stream(1, "replay");
  const auto batch = m.sample(16, rng);
  ASSERT_TRUE(batch);
  std::multiset<double> tags;
  for (const auto& t : *batch) tags.insert(t.r);
  std::multiset<double> want;
  for (int i = 1; i <= 16; ++i) want.insert(i);
  EXPECT_EQ(tags, want);
}

TEST(Replay, NotEnoughData) {
  ReplayMemory m = filled(10, 3);
  Rng rng = rng_stream(1, "replay");
  EXPECT_FALSE(m.sample(5, rng).has_value());
  EXPECT_FALSE(m.sample_ages(5, rng).has_value());
}

TEST(Replay, SingleDrawFrequenciesAreUniform) {
  ReplayMemory m = filled(4, 4);
  Rng rng = rng_stream(2, "replay");
  constexpr int n = 100000;
  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < n; ++i) ++counts[(*m.sample_ages(1, rng))[0]];
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (int c : counts) EXPECT_LT(std::abs(c - n * 0.25), 3 * sigma);
}

TEST(Replay, BatchesHaveNoDuplicatesAndDoNotMutate) {
  for (std::size_t size : {40u, 1000u}) {  // dense and sparse draw paths
    ReplayMemory m = filled(size, static_cast<int>(size));
    Rng rng = rng_stream(3, "replay");
    std::vector<double> before;
    for (std::size_t a = 0; a < m.size(); ++a) before.push_back(m.at_age(a).r);
    for (int b = 0; b < 2000; ++b) {
      const auto ages = *m.sample_ages(16, rng);
      ASSERT_EQ(std::set<std::size_t>(ages.begin(), ages.end()).size(), 16u);
    }
    for (std::size_t a = 0; a < m.size(); ++a) ASSERT_EQ(m.at_age(a).r, before[a]);
  }
}

TEST(Replay, SampleAndAgesAgree) {
  ReplayMemory m = filled(64, 100);
  Rng a = rng_stream(4, "replay"), b = rng_stream(4, "replay");
  const auto batch = *m.sample(8, a);
  const auto ages = *m.sample_ages(8, b);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(batch[i], m.at_age(ages[i]));
}

// Under uniform sampling without replacement from S items, the absolute age
// gap |a_{i+1} - a_i| between consecutive draws of a batch equals k with
// probability 2 (S - k) / (S (S - 1)). Chi-square goodness of fit over 10^4
// batches, gaps grouped into bins of roughly equal expected count.
double age_gap_p_value(std::size_t size, std::size_t batch, std::uint64_t seed) {
  ReplayMemory m = filled(size, static_cast<int>(size));
  Rng rng = rng_stream(seed, "replay");
  const double s = static_cast<double>(size);
  std::vector<double> observed(size, 0.0);
  double total = 0;
  for (int b = 0; b < 10000; ++b) {
    const auto ages = *m.sample_ages(batch, rng);
    for (std::size_t i = 1; i < ages.size(); ++i) {
      observed[static_cast<std::size_t>(std::llabs(static_cast<long long>(ages[i]) - static_cast<long long>(ages[i - 1])))] += 1;
      total += 1;
    }
  }
  constexpr int bins = 25;
  std::vector<double> obs_bin(bins, 0.0), exp_bin(bins, 0.0);
  double cum = 0;
  for (std::size_t k = 1; k < size; ++k) {
    const double p = 2.0 * (s - static_cast<double>(k)) / (s * (s - 1.0));
    const int bin = std::min(bins - 1, static_cast<int>(cum * bins));
    cum += p;
    obs_bin[static_cast<std::size_t>(bin)] += observed[k];
    exp_bin[static_cast<std::size_t>(bin)] += p * total;
  }
  double chi2 = 0;
  int used = 0;
  for (int i = 0; i < bins; ++i) {
    if (exp_bin[static_cast<std::size_t>(i)] <= 0) continue;
    const double d = obs_bin[static_cast<std::size_t>(i)] - exp_bin[static_cast<std::size_t>(i)];
    chi2 += d * d / exp_bin[static_cast<std::size_t>(i)];
    ++used;
  }
  const boost::math::chi_squared dist(used - 1);
  return boost::math::cdf(boost::math::complement(dist, chi2));
}

TEST(Replay, AgeGapsMatchUniformSamplingDensePath) { EXPECT_GT(age_gap_p_value(100, 32, 5), 0.01); }

TEST(Replay, AgeGapsMatchUniformSamplingSparsePath) { EXPECT_GT(age_gap_p_value(2000, 16, 6), 0.01); }

}  // namespace
}  // namespace v2vrl
