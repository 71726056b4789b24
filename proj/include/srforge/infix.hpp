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

#include <stdexcept>
#include <string>
#include <string_view>

#include "srforge/expr_tree.hpp"

namespace srforge {

class InfixParseError : public std::runtime_error {
 public:
  InfixParseError(std::size_t position, const std::string& message)
      : std::runtime_error(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses infix text into a tree over the 20-token vocabulary.
///
/// Grammar, loosest to tightest:
///
///   sum     := product (('+' | '-') product)*
///   product := prefix (('*' | '/') prefix)*
///   prefix  := '-' prefix | power
///   power   := primary ('^' ('2' | '3'))?
///   primary := name | number | func '(' sum ')' | '(' sum ')'
///
/// `a - b` becomes add(a, neg(b)), `a / b` becomes mul(a, inv(b)) and a
/// literal `1 / b` becomes inv(b). Numeric literals and `pi` are constants
/// and map to C. Functions: sin cos log exp sqrt.
ExprTree parse_infix(std::string_view text);

/// Renders a tree so that parse_infix(print_infix(t)) == t.
std::string print_infix(const ExprTree& tree);

/// Accepts either a whitespace-separated token line or infix text.
ExprTree parse_expression(std::string_view text);

}  // namespace srforge
