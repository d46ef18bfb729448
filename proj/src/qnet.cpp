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

#include "v2vrl/qnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "v2vrl/errors.hpp"

namespace v2vrl {

QNetwork::QNetwork(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw ContractViolation("QNetwork: need at least input and output dims");
  for (int d : dims_)
    if (d < 1) throw ContractViolation("QNetwork: layer dims must be positive");
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    DenseLayer layer;
    layer.in = dims_[l];
    layer.out = dims_[l + 1];
    layer.w.assign(static_cast<std::size_t>(layer.in * layer.out), 0.0);
    layer.b.assign(static_cast<std::size_t>(layer.out), 0.0);
    layers_.push_back(std::move(layer));
  }
}

QNetwork QNetwork::glorot(std::vector<int> dims, Rng& rng) {
  QNetwork net(std::move(dims));
  for (auto& layer : net.layers_) {
    const double limit = std::sqrt(6.0 / (layer.in + layer.out));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (double& w : layer.w) w = u(rng);
  }
  return net;
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.w.size() + l.b.size();
  return n;
}

namespace {

// Four interleaved partial sums; the fixed association order keeps results
// reproducible while letting the compiler overlap the multiply-adds.
double dot(const double* w, const double* x, int n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += w[i] * x[i];
    s1 += w[i + 1] * x[i + 1];
    s2 += w[i + 2] * x[i + 2];
    s3 += w[i + 3] * x[i + 3];
  }
  for (; i < n; ++i) s0 += w[i] * x[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

std::vector<std::vector<double>> QNetwork::forward_trace(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim())
    throw ContractViolation("forward: input has " + std::to_string(x.size()) + " entries, network expects " +
                            std::to_string(input_dim()));
  std::vector<std::vector<double>> acts;
  acts.reserve(layers_.size() + 1);
  acts.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const auto& a = acts.back();
    std::vector<double> z(layer.b);
    for (int o = 0; o < layer.out; ++o) {
      z[static_cast<std::size_t>(o)] += dot(layer.w.data() + static_cast<std::size_t>(o * layer.in), a.data(), layer.in);
    }
    if (l + 1 < layers_.size())
      for (double& v : z) v = v > 0.0 ? v : 0.0;
    acts.push_back(std::move(z));
  }
  return acts;
}

std::vector<double> QNetwork::forward(std::span<const double> x) const { return forward_trace(x).back(); }

bool QNetwork::finite() const {
  for (const auto& l : layers_) {
    for (double v : l.w)
      if (!std::isfinite(v)) return false;
    for (double v : l.b)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

Gradient::Gradient(const QNetwork& net) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    dw.emplace_back(net.layer(l).w.size(), 0.0);
    db.emplace_back(net.layer(l).b.size(), 0.0);
  }
}

Gradient& Gradient::operator+=(const Gradient& other) {
  if (other.dw.size() != dw.size()) throw ContractViolation("Gradient: shape mismatch");
  for (std::size_t l = 0; l < dw.size(); ++l) {
    if (other.dw[l].size() != dw[l].size() || other.db[l].size() != db[l].size())
      throw ContractViolation("Gradient: shape mismatch");
    for (std::size_t i = 0; i < dw[l].size(); ++i) dw[l][i] += other.dw[l][i];
    for (std::size_t i = 0; i < db[l].size(); ++i) db[l][i] += other.db[l][i];
  }
  return *this;
}

Gradient& Gradient::operator*=(double s) {
  for (auto& v : dw)
    for (double& x : v) x *= s;
  for (auto& v : db)
    for (double& x : v) x *= s;
  return *this;
}

bool Gradient::finite() const {
  for (const auto& v : dw)
    for (double x : v)
      if (!std::isfinite(x)) return false;
  for (const auto& v : db)
    for (double x : v)
      if (!std::isfinite(x)) return false;
  return true;
}

bool Gradient::shape_matches(const QNetwork& net) const {
  if (dw.size() != net.layer_count() || db.size() != net.layer_count()) return false;
  for (std::size_t l = 0; l < net.layer_count(); ++l)
    if (dw[l].size() != net.layer(l).w.size() || db[l].size() != net.layer(l).b.size()) return false;
  return true;
}

void Gradient::set_zero() {
  for (auto& v : dw) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : db) std::fill(v.begin(), v.end(), 0.0);
}

namespace {

void backprop(const QNetwork& net, const std::vector<std::vector<double>>& acts, int action, double td_error,
              Gradient& into) {
  std::vector<double> delta(static_cast<std::size_t>(net.output_dim()), 0.0);
  delta[static_cast<std::size_t>(action)] = td_error;
  for (std::size_t l = net.layer_count(); l-- > 0;) {
    const auto& layer = net.layer(l);
    const auto& in = acts[l];
    auto& dw = into.dw[l];
    auto& db = into.db[l];
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      db[static_cast<std::size_t>(o)] += d;
      double* row = dw.data() + static_cast<std::size_t>(o * layer.in);
      for (int i = 0; i < layer.in; ++i) row[i] += d * in[static_cast<std::size_t>(i)];
    }
    if (l == 0) break;
    // Rectifier derivative: a unit passes gradient only where it was positive.
    std::vector<double> prev(static_cast<std::size_t>(layer.in), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      const double* row = layer.w.data() + static_cast<std::size_t>(o * layer.in);
      for (int i = 0; i < layer.in; ++i) prev[static_cast<std::size_t>(i)] += row[i] * d;
    }
    for (int i = 0; i < layer.in; ++i)
      if (in[static_cast<std::size_t>(i)] <= 0.0) prev[static_cast<std::size_t>(i)] = 0.0;
    delta = std::move(prev);
  }
}

void check_backward_args(const QNetwork& net, int action, const Gradient& into) {
  if (action < 0 || action >= net.output_dim()) throw ContractViolation("backward: action index out of range");
  if (!into.shape_matches(net)) throw ContractViolation("backward: gradient shape mismatch");
}

}  // namespace

void backward_accumulate(const QNetwork& net, std::span<const double> x, int action, double td_error,
                         Gradient& into) {
  check_backward_args(net, action, into);
  backprop(net, net.forward_trace(x), action, td_error, into);
}

double accumulate_td_gradient(const QNetwork& net, std::span<const double> x, int action, double target,
                              Gradient& into) {
  check_backward_args(net, action, into);
  const auto acts = net.forward_trace(x);
  const double q = acts.back()[static_cast<std::size_t>(action)];
  backprop(net, acts, action, q - target, into);
  return q;
}

Gradient backward(const QNetwork& net, std::span<const double> x, int action, double td_error) {
  Gradient g(net);
  backward_accumulate(net, x, action, td_error, g);
  return g;
}

void sgd_update(QNetwork& net, const Gradient& grad, double lr) {
  if (!(lr > 0.0)) throw ContractViolation("sgd_update: learning rate must be > 0");
  if (!grad.shape_matches(net)) throw ContractViolation("sgd_update: gradient shape mismatch");
  if (!grad.finite()) throw TrainingError("sgd_update: non-finite gradient, update rejected");
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    auto& layer = net.layer(l);
    for (std::size_t i = 0; i < layer.w.size(); ++i) layer.w[i] -= lr * grad.dw[l][i];
    for (std::size_t i = 0; i < layer.b.size(); ++i) layer.b[i] -= lr * grad.db[l][i];
  }
}

namespace {

void write_tensor(std::string& out, const std::vector<double>& v) {
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    if (i) out += ' ';
    out += buf;
  }
  out += '\n';
}

std::vector<double> read_tensor(std::istream& in, std::size_t expected, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(std::string("checkpoint: missing ") + what + " line");
  std::istringstream ls(line);
  std::vector<double> v;
  std::string tok;
  while (ls >> tok) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ConfigError("checkpoint: bad number '" + tok + "'");
    v.push_back(x);
  }
  if (v.size() != expected)
    throw ConfigError(std::string("checkpoint: ") + what + " has " + std::to_string(v.size()) +
                            " values, expected " + std::to_string(expected));
  return v;
}

}  // namespace

std::string serialize(const QNetwork& net) {
  std::string out = "QNET v1\n";
  for (std::size_t i = 0; i < net.dims().size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(net.dims()[i]);
  }
  out += '\n';
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    write_tensor(out, net.layer(l).w);
    write_tensor(out, net.layer(l).b);
  }
  return out;
}

QNetwork deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "QNET v1") throw ConfigError("checkpoint: missing 'QNET v1' header");
  if (!std::getline(in, line)) throw ConfigError("checkpoint: missing layer dims");
  std::istringstream ds(line);
  std::vector<int> dims;
  int d = 0;
  while (ds >> d) dims.push_back(d);
  if (!ds.eof()) throw ConfigError("checkpoint: bad layer dims line");
  QNetwork net(dims);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    net.layer(l).w = read_tensor(in, net.layer(l).w.size(), "weight");
    net.layer(l).b = read_tensor(in, net.layer(l).b.size(), "bias");
  }
  return net;
}

void save_checkpoint(const QNetwork& net, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  f << serialize(net);
  if (!f) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

QNetwork load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return deserialize(ss.str());
}

GradCheckReport gradcheck(int triples, std::uint64_t seed, double eps) {
  Rng rng = rng_stream(seed, "gradcheck");
  std::uniform_int_distribution<int> in_dim(2, 18);
  std::uniform_int_distribution<int> hidden(1, 64);
  std::uniform_int_distribution<int> out_dim(1, 12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  GradCheckReport report;
  report.triples = triples;
  for (int t = 0; t < triples; ++t) {
    std::vector<int> dims{in_dim(rng), hidden(rng), hidden(rng), out_dim(rng)};
    QNetwork net = QNetwork::glorot(dims, rng);
    for (std::size_t l = 0; l < net.layer_count(); ++l)
      for (double& b : net.layer(l).b) b = 0.1 * u(rng);
    std::vector<double> x(static_cast<std::size_t>(dims.front()));
    for (double& v : x) v = u(rng);
    const int action = std::uniform_int_distribution<int>(0, dims.back() - 1)(rng);
    const double target = u(rng);

    // Loss plus the hidden-unit on/off pattern, so perturbations that move a
    // unit across the ReLU kink can be excluded from the comparison.
    auto probe = [&](const QNetwork& n, std::vector<bool>& pattern) {
      const auto acts = n.forward_trace(x);
      pattern.clear();
      for (std::size_t l = 1; l + 1 < acts.size(); ++l)
        for (double a : acts[l]) pattern.push_back(a > 0.0);
      const double td = acts.back()[static_cast<std::size_t>(action)] - target;
      return 0.5 * td * td;
    };
    std::vector<bool> base_pattern, up_pattern, down_pattern;
    probe(net, base_pattern);
    const double td = net.forward(x)[static_cast<std::size_t>(action)] - target;
    const Gradient g = backward(net, x, action, td);

    auto check = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + eps;
      const double up = probe(net, up_pattern);
      param = saved - eps;
      const double down = probe(net, down_pattern);
      param = saved;
      if (up_pattern != base_pattern || down_pattern != base_pattern) {
        ++report.kink_skips;
        return;
      }
      const double numeric = (up - down) / (2.0 * eps);
      const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
      report.max_rel_error = std::max(report.max_rel_error, std::abs(analytic - numeric) / scale);
      ++report.entries;
    };
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      auto& layer = net.layer(l);
      for (std::size_t i = 0; i < layer.w.size(); ++i) check(layer.w[i], g.dw[l][i]);
      for (std::size_t i = 0; i < layer.b.size(); ++i) check(layer.b[i], g.db[l][i]);
    }
  }
  return report;
}

}  // namespace v2vrl
