// Copyright 2026 The srforge Authors. All Rights Reserved.
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
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>

#include "srforge/rng.hpp"
#include "srforge/tensor.hpp"

namespace srforge {
inline namespace SRFORGE_PRECISION {

/// A trainable tensor with its gradient and Adam moments.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor m;
  Tensor v;
  bool has_grad = false;
};

/// Named parameters in registration order. Addresses are stable.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

  /// Registers a zero-initialized parameter; names must be unique.
  Parameter& add(std::string name, Shape shape);
  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::deque<Parameter>& parameters() { return params_; }
  const std::deque<Parameter>& parameters() const { return params_; }
  std::size_t total_count() const;

  /// Zeroes gradients and clears the has_grad flags.
  void zero_grad();

  /// Optimizer step counter (number of completed updates).
  std::uint64_t step = 0;

 private:
  std::deque<Parameter> params_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct Var {
  std::uint32_t id = UINT32_MAX;
  bool valid() const { return id != UINT32_MAX; }
};

/// Reverse-mode tape. Ops append nodes with a backward closure; backward()
/// replays them in reverse. Parameter nodes alias their Parameter, so
/// gradients accumulate straight into Parameter::grad.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, Var out)>;

  /// `training` enables dropout. A graph that does not `record` keeps values
  /// only, for inference.
  explicit Graph(bool training = false, bool record = true, std::uint64_t dropout_seed = 0);
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool training() const { return training_; }
  bool recording() const { return record_; }
  Rng& rng() { return rng_; }

  Var constant(Tensor value);
  Var parameter(Parameter& p);

  const Tensor& value(Var v) const;
  /// Gradient buffer of `v`, zero-filled on first access.
  Tensor& grad(Var v);
  bool requires_grad(Var v) const;

  /// Appends an op output. The closure runs only if some parent requires a
  /// gradient.
  Var emit(Tensor value, std::initializer_list<Var> parents, BackwardFn backward);

  /// Seeds d(root)/d(root) = 1 for a single-element root and back-propagates.
  void backward(Var root);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Parameter* param = nullptr;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Node& node(Var v);
  const Node& node(Var v) const;

  bool training_;
  bool record_;
  Rng rng_;
  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, Var> param_vars_;
};

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
