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

#include "cbvf/expression.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "cbvf/error.h"

namespace cbvf {

struct Expression::Node {
  enum class Op { kConst, kX, kU, kAdd, kSub, kMul, kDiv, kNeg, kAbs, kPow,
                  kMin, kMax };
  Op op = Op::kConst;
  double value = 0.0;
  int index = 0;
  std::vector<std::shared_ptr<const Node>> args;

  double Eval(const Vec& x, const Vec& u) const {
    switch (op) {
      case Op::kConst:
        return value;
      case Op::kX:
        if (index >= x.size()) throw DomainError("state index out of range");
        return x[index];
      case Op::kU:
        if (index >= u.size()) throw DomainError("control index out of range");
        return u[index];
      case Op::kAdd:
        return args[0]->Eval(x, u) + args[1]->Eval(x, u);
      case Op::kSub:
        return args[0]->Eval(x, u) - args[1]->Eval(x, u);
      case Op::kMul:
        return args[0]->Eval(x, u) * args[1]->Eval(x, u);
      case Op::kDiv:
        return args[0]->Eval(x, u) / args[1]->Eval(x, u);
      case Op::kNeg:
        return -args[0]->Eval(x, u);
      case Op::kAbs:
        return std::abs(args[0]->Eval(x, u));
      case Op::kPow:
        return std::pow(args[0]->Eval(x, u), args[1]->Eval(x, u));
      case Op::kMin:
      case Op::kMax: {
        double acc = args[0]->Eval(x, u);
        for (std::size_t i = 1; i < args.size(); ++i) {
          const double v = args[i]->Eval(x, u);
          acc = op == Op::kMin ? std::min(acc, v) : std::max(acc, v);
        }
        return acc;
      }
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

class Parser {
 public:
  Parser(const std::string& text, const std::string& where)
      : text_(text), where_(where) {}

  NodePtr ParseAll() {
    NodePtr root = ParseExpr();
    SkipSpace();
    if (pos_ != text_.size()) Fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

  int max_x = 0;
  int max_u = 0;

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw ConfigError(where_, what + " at offset " + std::to_string(pos_) +
                                  " in \"" + text_ + "\"");
  }

  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool Accept(char c) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void Expect(char c) {
    if (!Accept(c)) Fail(std::string("expected '") + c + "'");
  }

  static NodePtr Make(Node::Op op, std::vector<NodePtr> args) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    return n;
  }

  NodePtr ParseExpr() {
    NodePtr lhs = ParseTerm();
    for (;;) {
      if (Accept('+')) {
        lhs = Make(Node::Op::kAdd, {lhs, ParseTerm()});
      } else if (Accept('-')) {
        lhs = Make(Node::Op::kSub, {lhs, ParseTerm()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr ParseTerm() {
    NodePtr lhs = ParseUnary();
    for (;;) {
      if (Accept('*')) {
        lhs = Make(Node::Op::kMul, {lhs, ParseUnary()});
      } else if (Accept('/')) {
        lhs = Make(Node::Op::kDiv, {lhs, ParseUnary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr ParseUnary() {
    if (Accept('-')) return Make(Node::Op::kNeg, {ParseUnary()});
    if (Accept('+')) return ParseUnary();
    return ParsePrimary();
  }

  NodePtr ParsePrimary() {
    SkipSpace();
    if (pos_ >= text_.size()) Fail("unexpected end of expression");
    const char c = text_[pos_];
    if (Accept('(')) {
      NodePtr inner = ParseExpr();
      Expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      const char* begin = text_.data() + pos_;
      const auto res = std::from_chars(begin, text_.data() + text_.size(), value);
      if (res.ec != std::errc()) Fail("bad number");
      pos_ += static_cast<std::size_t>(res.ptr - begin);
      auto n = std::make_shared<Node>();
      n->value = value;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[end]))) {
        ++end;
      }
      const std::string name = text_.substr(pos_, end - pos_);
      const std::size_t start = pos_;
      pos_ = end;
      if ((name[0] == 'x' || name[0] == 'u') && name.size() == 2 &&
          name[1] >= '1' && name[1] <= '0' + kMaxDim) {
        auto n = std::make_shared<Node>();
        n->index = name[1] - '1';
        if (name[0] == 'x') {
          n->op = Node::Op::kX;
          max_x = std::max(max_x, n->index + 1);
        } else {
          n->op = Node::Op::kU;
          max_u = std::max(max_u, n->index + 1);
        }
        return n;
      }
      Node::Op op;
      std::size_t min_args = 1;
      std::size_t max_args = 1;
      if (name == "abs") {
        op = Node::Op::kAbs;
      } else if (name == "pow") {
        op = Node::Op::kPow;
        min_args = max_args = 2;
      } else if (name == "min" || name == "max") {
        op = name == "min" ? Node::Op::kMin : Node::Op::kMax;
        min_args = 2;
        max_args = 64;
      } else {
        pos_ = start;
        Fail("unknown identifier '" + name + "'");
      }
      Expect('(');
      std::vector<NodePtr> args{ParseExpr()};
      while (Accept(',')) args.push_back(ParseExpr());
      Expect(')');
      if (args.size() < min_args || args.size() > max_args) {
        pos_ = start;
        Fail("wrong number of arguments to " + name);
      }
      return Make(op, std::move(args));
    }
    Fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& text_;
  const std::string& where_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::Parse(const std::string& text, const std::string& where) {
  Parser parser(text, where);
  Expression e;
  e.text_ = text;
  e.root_ = parser.ParseAll();
  e.max_x_ = parser.max_x;
  e.max_u_ = parser.max_u;
  return e;
}

double Expression::Eval(const Vec& x, const Vec& u) const {
  return root_->Eval(x, u);
}

}  // namespace cbvf
