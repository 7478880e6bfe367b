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

#include "phes/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace phes {

struct Expression::Node {
    enum Kind { kConst, kVar, kNeg, kAdd, kSub, kMul, kDiv, kSin, kCos } kind = kConst;
    double value = 0.0;
    Index var = 0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;

    double eval(const Vec& q) const {
        switch (kind) {
            case kConst: return value;
            case kVar: return q(var);
            case kNeg: return -a->eval(q);
            case kAdd: return a->eval(q) + b->eval(q);
            case kSub: return a->eval(q) - b->eval(q);
            case kMul: return a->eval(q) * b->eval(q);
            case kDiv: return a->eval(q) / b->eval(q);
            case kSin: return std::sin(a->eval(q));
            case kCos: return std::cos(a->eval(q));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Expression::Node::Kind k, NodePtr a = {}, NodePtr b = {}) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    Parser(const std::string& s, Index dof, int line, int column)
        : s_(s), dof_(dof), line_(line), column_(column) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression: " + msg, line_, column_ + static_cast<int>(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Expression::Node::kAdd, lhs, term());
            } else if (accept('-')) {
                lhs = make(Expression::Node::kSub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Expression::Node::kMul, lhs, unary());
            } else if (accept('/')) {
                lhs = make(Expression::Node::kDiv, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Expression::Node::kNeg, unary());
        if (accept('+')) return unary();
        return primary();
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (accept('(')) {
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string id = s_.substr(start, pos_ - start);
            if (id == "pi") {
                auto n = std::make_shared<Expression::Node>();
                n->value = std::numbers::pi;
                return n;
            }
            if (id == "sin" || id == "cos") {
                if (!accept('(')) fail("expected '(' after " + id);
                NodePtr arg = expr();
                if (!accept(')')) fail("expected ')'");
                return make(id == "sin" ? Expression::Node::kSin : Expression::Node::kCos, arg);
            }
            if (id.size() > 1 && id[0] == 'q' &&
                id.find_first_not_of("0123456789", 1) == std::string::npos) {
                const long k = std::strtol(id.c_str() + 1, nullptr, 10);
                if (k < 1 || k > dof_) {
                    pos_ = start;
                    fail("coordinate " + id + " out of range q1..q" + std::to_string(dof_));
                }
                auto n = std::make_shared<Expression::Node>();
                n->kind = Expression::Node::kVar;
                n->var = static_cast<Index>(k - 1);
                return n;
            }
            pos_ = start;
            fail("unknown identifier '" + id + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        auto n = std::make_shared<Expression::Node>();
        n->value = v;
        return n;
    }

    const std::string& s_;
    Index dof_;
    int line_;
    int column_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text, Index dof, int line, int column) {
    Expression e;
    e.root_ = Parser(text, dof, line, column).parse();
    e.dof_ = dof;
    e.text_ = text;
    return e;
}

double Expression::operator()(const Vec& q) const {
    require_same_size(q.size(), dof_, "expression coordinates");
    return root_->eval(q);
}

}  // namespace phes
