// Copyright 2026 The cbvf Authors
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

// Arithmetic expressions over x1..x3 and u1..u3:
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | primary
//   primary:= number | variable | call | '(' expr ')'
//   call   := abs(e) | pow(e, e) | min(e, e, ...) | max(e, e, ...)
//
// No transcendental functions.

#ifndef CBVF_EXPRESSION_H_
#define CBVF_EXPRESSION_H_

#include <memory>
#include <string>
#include <vector>

#include "cbvf/dynamics.h"

namespace cbvf {

class Expression {
 public:
  // Throws ConfigError(where, ...) with the character offset on bad input.
  static Expression Parse(const std::string& text,
                          const std::string& where = "expression");

  double Eval(const Vec& x, const Vec& u = Vec()) const;

  // Highest index used per variable family (0 when unused).
  int max_state_index() const { return max_x_; }
  int max_control_index() const { return max_u_; }
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
  int max_x_ = 0;
  int max_u_ = 0;
};

}  // namespace cbvf

#endif  // CBVF_EXPRESSION_H_
