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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "v2vrl/errors.hpp"
#include "v2vrl/qnet.hpp"

namespace v2vrl {
namespace {

std::vector<double> random_input(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = u(rng);
  return x;
}

// Independent dense evaluation: plain loops over the stored weights.
std::vector<double> reference_forward(const QNetwork& net, std::vector<double> a) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const DenseLayer& L = net.layer(l);
    std::vector<double> z(static_cast<std::size_t>(L.out));
    for (int o = 0; o < L.out; ++o) {
      double s = L.b[static_cast<std::size_t>(o)];
      for (int i = 0; i < L.in; ++i) s += L.w[static_cast<std::size_t>(o * L.in + i)] * a[static_cast<std::size_t>(i)];
      z[static_cast<std::size_t>(o)] = (l + 1 < net.layer_count()) ? std::max(0.0, s) : s;
    }
    a = std::move(z);
  }
  return a;
}

TEST(Forward, ZeroNetworkGivesZero) {
  QNetwork net({18, 64, 32, 12});
  Rng rng = rng_stream(1, "x");
  for (double q : net.forward(random_input(18, rng))) EXPECT_EQ(q, 0.0);
}

TEST(Forward, SingleLayerIdentityProjection) {
  QNetwork net({3, 2});
  net.layer(0).w = {1, 0, 0, 0, 1, 0};
  const std::vector<double> x{0.5, -2.0, 7.0};
  EXPECT_EQ(net.forward(x), (std::vector<double>{0.5, -2.0}));
}

TEST(Forward, MatchesReferenceEvaluation) {
  Rng rng = rng_stream(2, "net");
  for (int t = 0; t < 20; ++t) {
    QNetwork net = QNetwork::glorot({18, 64, 32, 12}, rng);
    for (std::size_t l = 0; l < net.layer_count(); ++l)
      for (double& b : net.layer(l).b) b = 0.05 * random_input(1, rng)[0];
    const auto x = random_input(18, rng);
    const auto got = net.forward(x);
    const auto want = reference_forward(net, x);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
    EXPECT_EQ(net.forward(x), got);  // bit-identical on repeat
  }
}

TEST(Forward, RejectsWrongInputSize) {
  QNetwork net({4, 3});
  EXPECT_THROW(net.forward(std::vector<double>(5)), ContractViolation);
}

TEST(Forward, HiddenActivationsAreNonNegative) {
  Rng rng = rng_stream(3, "net");
  QNetwork net = QNetwork::glorot({10, 16, 8, 4}, rng);
  for (int t = 0; t < 100; ++t) {
    auto x = random_input(10, rng);
    for (double& v : x) v *= 50.0;
    const auto acts = net.forward_trace(x);
    for (std::size_t l = 1; l + 1 < acts.size(); ++l)
      for (double a : acts[l]) ASSERT_GE(a, 0.0);
  }
}

TEST(Glorot, WeightsWithinLimitAndZeroBias) {
  Rng rng = rng_stream(4, "init");
  QNetwork net = QNetwork::glorot({18, 64, 32, 12}, rng);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const DenseLayer& L = net.layer(l);
    const double limit = std::sqrt(6.0 / (L.in + L.out));
    for (double w : L.w) EXPECT_LE(std::abs(w), limit);
    for (double b : L.b) EXPECT_EQ(b, 0.0);
  }
  EXPECT_EQ(net.parameter_count(), 18u * 64 + 64 + 64 * 32 + 32 + 32 * 12 + 12);
}

TEST(Backward, ZeroTdErrorGivesZeroGradient) {
  Rng rng = rng_stream(5, "net");
  QNetwork net = QNetwork::glorot({6, 8, 5, 3}, rng);
  const Gradient g = backward(net, random_input(6, rng), 1, 0.0);
  for (const auto& v : g.dw)
    for (double x : v) EXPECT_EQ(x, 0.0);
  for (const auto& v : g.db)
    for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(Backward, ZeroInputZeroBiasFirstLayerGradientIsZero) {
  Rng rng = rng_stream(6, "net");
  QNetwork net = QNetwork::glorot({6, 8, 5, 3}, rng);
  const Gradient g = backward(net, std::vector<double>(6, 0.0), 2, 1.7);
  for (double x : g.dw[0]) EXPECT_EQ(x, 0.0);
}

TEST(Backward, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const GradCheckReport r = gradcheck(100, seed);
    EXPECT_EQ(r.triples, 100);
    EXPECT_GT(r.entries, 100000u);
    EXPECT_LT(r.max_rel_error, 1e-5) << "seed " << seed;
    EXPECT_LT(r.kink_skips, r.entries / 1000);
  }
}

TEST(Backward, AccumulateEqualsSumOfSingles) {
  Rng rng = rng_stream(7, "net");
  QNetwork net = QNetwork::glorot({5, 7, 4}, rng);
  const auto x1 = random_input(5, rng), x2 = random_input(5, rng);
  Gradient acc(net);
  backward_accumulate(net, x1, 0, 0.3, acc);
  backward_accumulate(net, x2, 3, -1.1, acc);
  Gradient sum = backward(net, x1, 0, 0.3);
  sum += backward(net, x2, 3, -1.1);
  for (std::size_t l = 0; l < acc.dw.size(); ++l) {
    for (std::size_t i = 0; i < acc.dw[l].size(); ++i) EXPECT_NEAR(acc.dw[l][i], sum.dw[l][i], 1e-15);
    for (std::size_t i = 0; i < acc.db[l].size(); ++i) EXPECT_NEAR(acc.db[l][i], sum.db[l][i], 1e-15);
  }
}

TEST(Sgd, ZeroGradientLeavesParameters) {
  Rng rng = rng_stream(8, "net");
  QNetwork net = QNetwork::glorot({4, 6, 3}, rng);
  const QNetwork before = net;
  sgd_update(net, Gradient(net), 0.5);
  EXPECT_EQ(net, before);
}

TEST(Sgd, UnitRateWithParametersAsGradientZeroesThem) {
  Rng rng = rng_stream(9, "net");
  QNetwork net = QNetwork::glorot({4, 6, 3}, rng);
  Gradient g(net);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    g.dw[l] = net.layer(l).w;
    g.db[l] = net.layer(l).b;
  }
  sgd_update(net, g, 1.0);
  EXPECT_EQ(net, QNetwork({4, 6, 3}));
}

TEST(Sgd, TwoStepsEqualOneSummedStep) {
  Rng rng = rng_stream(10, "net");
  QNetwork a = QNetwork::glorot({4, 6, 3}, rng);
  QNetwork b = a;
  const Gradient g1 = backward(a, random_input(4, rng), 1, 0.8);
  const Gradient g2 = backward(a, random_input(4, rng), 2, -0.4);
  sgd_update(a, g1, 0.01);
  sgd_update(a, g2, 0.01);
  Gradient sum = g1;
  sum += g2;
  sgd_update(b, sum, 0.01);
  for (std::size_t l = 0; l < a.layer_count(); ++l)
    for (std::size_t i = 0; i < a.layer(l).w.size(); ++i) EXPECT_NEAR(a.layer(l).w[i], b.layer(l).w[i], 1e-15);
}

TEST(Sgd, RejectsBadArguments) {
  QNetwork net({3, 2});
  EXPECT_THROW(sgd_update(net, Gradient(net), 0.0), ContractViolation);
  EXPECT_THROW(sgd_update(net, Gradient(QNetwork({3, 4})), 0.1), ContractViolation);
  Gradient bad(net);
  bad.dw[0][0] = std::nan("");
  EXPECT_THROW(sgd_update(net, bad, 0.1), TrainingError);
}

TEST(Sgd, SmallStepDescendsSquaredTdLoss) {
  Rng rng = rng_stream(11, "net");
  for (int t = 0; t < 20; ++t) {
    QNetwork net = QNetwork::glorot({18, 64, 32, 12}, rng);
    const auto x = random_input(18, rng);
    const int action = t % 12;
    const double target = 2.0 * random_input(1, rng)[0];
    auto loss = [&] {
      const double td = net.forward(x)[static_cast<std::size_t>(action)] - target;
      return 0.5 * td * td;
    };
    const double before = loss();
    Gradient g(net);
    accumulate_td_gradient(net, x, action, target, g);
    sgd_update(net, g, 1e-4);
    EXPECT_LT(loss(), before);
  }
}

TEST(Copy, CopyIsIndependentSnapshot) {
  Rng rng = rng_stream(12, "net");
  QNetwork src = QNetwork::glorot({5, 6, 2}, rng);
  const QNetwork copy = copy_params(src);
  const auto x = random_input(5, rng);
  EXPECT_EQ(copy.forward(x), src.forward(x));
  EXPECT_EQ(serialize(copy), serialize(src));
  const auto before = copy.forward(x);
  sgd_update(src, backward(src, x, 0, 1.0), 0.1);
  EXPECT_EQ(copy.forward(x), before);
  EXPECT_NE(src.forward(x), before);
}

TEST(Checkpoint, RoundTripReproducesQValues) {
  Rng rng = rng_stream(13, "net");
  QNetwork net = QNetwork::glorot({18, 64, 32, 12}, rng);
  for (std::size_t l = 0; l < net.layer_count(); ++l)
    for (double& b : net.layer(l).b) b = random_input(1, rng)[0] * 1e-3;
  const auto path = std::filesystem::temp_directory_path() / "v2vrl_test_ckpt.txt";
  save_checkpoint(net, path);
  const QNetwork back = load_checkpoint(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back, net);
  for (int t = 0; t < 10; ++t) {
    const auto x = random_input(18, rng);
    const auto a = net.forward(x), b = back.forward(x);
    for (std::size_t i = 0; i < a.size(); ++i) {
      char sa[40], sb[40];
      std::snprintf(sa, sizeof sa, "%.17g", a[i]);
      std::snprintf(sb, sizeof sb, "%.17g", b[i]);
      EXPECT_STREQ(sa, sb);
    }
  }
}

TEST(Checkpoint, HeaderAndMalformedInput) {
  const std::string text = serialize(QNetwork({2, 3, 1}));
  EXPECT_EQ(text.rfind("QNET v1\n", 0), 0u);
  EXPECT_THROW(deserialize("QNET v2\n2 1\n0 0\n0\n"), ConfigError);
  EXPECT_THROW(deserialize("QNET v1\n2 1\n0\n0\n"), ConfigError);
  EXPECT_EQ(deserialize(text), QNetwork({2, 3, 1}));
}

}  // namespace
}  // namespace v2vrl
