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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srforge/real.hpp"

namespace srforge {
inline namespace SRFORGE_PRECISION {

using Shape = std::vector<std::size_t>;

inline constexpr int kMaxRank = 4;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major tensor of rank 0..4 with contiguous storage.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, real fill = real(0));
  Tensor(Shape shape, std::vector<real> values);

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  /// Negative axes count from the end.
  std::size_t dim(int axis) const;
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<real> data() { return data_; }
  std::span<const real> data() const { return data_; }
  real& operator[](std::size_t i) { return data_[i]; }
  real operator[](std::size_t i) const { return data_[i]; }

  void fill(real v);
  /// Same payload, new shape of equal size.
  Tensor reshaped(Shape shape) const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<real> data_;
};

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
