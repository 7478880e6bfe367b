/*
 Copyright 2026 The phes Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef PHES_EXPR_HPP
#define PHES_EXPR_HPP

#include "phes/types.hpp"

#include <memory>
#include <string>

namespace phes {

/// Arithmetic expression over the coordinates q1..qn:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | primary
///   primary := number | 'pi' | 'q' index | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
///
/// Numbers are decimal with an optional exponent.
class Expression {
public:
    /// Throws ParseError with line and column; `column` is the position of the
    /// first character of text.
    static Expression parse(const std::string& text, Index dof, int line = 1, int column = 1);

    double operator()(const Vec& q) const;
    Index dof() const { return dof_; }
    const std::string& text() const { return text_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    Index dof_ = 0;
    std::string text_;
};

}  // namespace phes

#endif  // PHES_EXPR_HPP
