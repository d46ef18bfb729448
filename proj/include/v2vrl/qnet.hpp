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

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "v2vrl/rng.hpp"

namespace v2vrl {

// Fully connected layer, weights stored row-major as [out][in].
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> w;
  std::vector<double> b;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Feedforward Q-network: rectifier hidden layers, linear head with one
// output per flat action index.
class QNetwork {
 public:
  QNetwork() = default;
  // All parameters zero.
  explicit QNetwork(std::vector<int> dims);
  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static QNetwork glorot(std::vector<int> dims, Rng& rng);

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  std::size_t layer_count() const { return layers_.size(); }
  DenseLayer& layer(std::size_t i) { return layers_[i]; }
  const DenseLayer& layer(std::size_t i) const { return layers_[i]; }
  std::size_t parameter_count() const;

  // Q-values for every action. Throws ContractViolation on a size mismatch.
  std::vector<double> forward(std::span<const double> x) const;
  // Per-layer post-activation values; [0] is the input, back() the Q-values.
  std::vector<std::vector<double>> forward_trace(std::span<const double> x) const;

  bool finite() const;

  friend bool operator==(const QNetwork&, const QNetwork&) = default;

 private:
  std::vector<int> dims_;
  std::vector<DenseLayer> layers_;
};

// Same shape as the network it was taken from.
struct Gradient {
  std::vector<std::vector<double>> dw;
  std::vector<std::vector<double>> db;

  Gradient() = default;
  explicit Gradient(const QNetwork& net);

  Gradient& operator+=(const Gradient& other);
  Gradient& operator*=(double s);
  bool finite() const;
  bool shape_matches(const QNetwork& net) const;
  void set_zero();
};

// Gradient of 0.5 * td_error^2 through output `action` only, where
// td_error = Q(x, action) - target.
Gradient backward(const QNetwork& net, std::span<const double> x, int action, double td_error);

// Adds the same gradient into `into`; used to accumulate mini-batches.
void backward_accumulate(const QNetwork& net, std::span<const double> x, int action, double td_error,
                         Gradient& into);

// Accumulates the gradient of 0.5 * (Q(x, action) - target)^2 into `into`
// with a single forward pass and returns Q(x, action).
double accumulate_td_gradient(const QNetwork& net, std::span<const double> x, int action, double target,
                              Gradient& into);

// theta -= lr * grad. Non-finite gradients throw TrainingError and leave the
// network untouched.
void sgd_update(QNetwork& net, const Gradient& grad, double lr);

// Independent deep copy (the target-network snapshot).
inline QNetwork copy_params(const QNetwork& src) { return src; }

// Checkpoint text: "QNET v1", the layer dims, then one line per tensor
// (W0 b0 W1 b1 ...) in row-major order with 17 significant digits.
std::string serialize(const QNetwork& net);
QNetwork deserialize(std::string_view text);
void save_checkpoint(const QNetwork& net, const std::filesystem::path& path);
QNetwork load_checkpoint(const std::filesystem::path& path);

struct GradCheckReport {
  int triples = 0;
  std::size_t entries = 0;
  double max_rel_error = 0.0;
  std::size_t kink_skips = 0;  // entries whose +-eps probe flips a ReLU unit
};

// Compares backward() against central differences (step `eps`) of the
// squared TD loss on random (network, input, action) triples. Entries whose
// perturbation crosses a ReLU kink are counted in kink_skips, not compared.
GradCheckReport gradcheck(int triples, std::uint64_t seed, double eps = 1e-5);

}  // namespace v2vrl
