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

#include <stdexcept>
#include <string>

namespace v2vrl {

// Invalid user-supplied configuration. The message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (shape mismatch, bad index, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Training could not proceed: non-finite gradients or diverging Q-values.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The exhaustive oracle was asked to enumerate a search space over its bound.
class OracleRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace v2vrl
