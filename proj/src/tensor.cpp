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

#include "srforge/tensor.hpp"

#include <algorithm>

namespace srforge {
inline namespace SRFORGE_PRECISION {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

Tensor::Tensor(Shape shape, real fill) : shape_(std::move(shape)) {
  if (rank() > kMaxRank) throw ShapeError("tensor rank above 4: " + shape_string(shape_));
  data_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<real> values) : shape_(std::move(shape)), data_(std::move(values)) {
  if (rank() > kMaxRank) throw ShapeError("tensor rank above 4: " + shape_string(shape_));
  if (data_.size() != shape_size(shape_)) {
    throw ShapeError("payload of " + std::to_string(data_.size()) + " values for shape " +
                     shape_string(shape_));
  }
}

std::size_t Tensor::dim(int axis) const {
  const int a = axis < 0 ? axis + rank() : axis;
  if (a < 0 || a >= rank()) throw ShapeError("axis out of range for shape " + shape_string(shape_));
  return shape_[static_cast<std::size_t>(a)];
}

void Tensor::fill(real v) { std::fill(data_.begin(), data_.end(), v); }

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != size()) {
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
