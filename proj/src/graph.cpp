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

#include "srforge/graph.hpp"

#include <stdexcept>

namespace srforge {
inline namespace SRFORGE_PRECISION {

Parameter& ParameterStore::add(std::string name, Shape shape) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  Parameter p;
  p.name = name;
  p.value = Tensor(shape);
  p.grad = Tensor(shape);
  p.m = Tensor(shape);
  p.v = Tensor(std::move(shape));
  index_.emplace(std::move(name), params_.size());
  params_.push_back(std::move(p));
  return params_.back();
}

Parameter& ParameterStore::at(std::string_view name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + std::string(name));
  return params_[it->second];
}

const Parameter& ParameterStore::at(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + std::string(name));
  return params_[it->second];
}

bool ParameterStore::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

std::size_t ParameterStore::total_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) {
    p.grad.fill(real(0));
    p.has_grad = false;
  }
}

Graph::Graph(bool training, bool record, std::uint64_t dropout_seed)
    : training_(training), record_(record), rng_(dropout_seed) {}

Graph::Node& Graph::node(Var v) {
  if (v.id >= nodes_.size()) throw std::out_of_range("invalid graph variable");
  return nodes_[v.id];
}

const Graph::Node& Graph::node(Var v) const {
  if (v.id >= nodes_.size()) throw std::out_of_range("invalid graph variable");
  return nodes_[v.id];
}

Var Graph::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Graph::parameter(Parameter& p) {
  if (auto it = param_vars_.find(&p); it != param_vars_.end()) return it->second;
  Node n;
  n.param = &p;
  n.requires_grad = record_;
  nodes_.push_back(std::move(n));
  const Var v{static_cast<std::uint32_t>(nodes_.size() - 1)};
  param_vars_.emplace(&p, v);
  return v;
}

const Tensor& Graph::value(Var v) const {
  const Node& n = node(v);
  return n.param ? n.param->value : n.value;
}

Tensor& Graph::grad(Var v) {
  Node& n = node(v);
  if (n.param) {
    n.param->has_grad = true;
    return n.param->grad;
  }
  if (n.grad.shape() != n.value.shape() || n.grad.size() != n.value.size()) n.grad = Tensor(n.value.shape());
  return n.grad;
}

bool Graph::requires_grad(Var v) const { return node(v).requires_grad; }

Var Graph::emit(Tensor value, std::initializer_list<Var> parents, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  if (record_) {
    for (Var p : parents) {
      if (p.valid() && node(p).requires_grad) n.requires_grad = true;
    }
    if (n.requires_grad) n.backward = std::move(backward);
  }
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

void Graph::backward(Var root) {
  if (!record_) throw std::logic_error("backward on a graph that does not record");
  Node& r = node(root);
  if (r.value.size() != 1) throw std::invalid_argument("backward needs a single-element root");
  if (!r.requires_grad) return;
  grad(root)[0] = real(1);
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.backward && n.grad.size() == n.value.size() && !n.value.empty()) {
      n.backward(*this, Var{static_cast<std::uint32_t>(i)});
    }
  }
}

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
