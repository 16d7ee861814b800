#include "cflow/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

namespace cflow {

struct Expression::Node {
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };
  Op op = Op::Const;
  double value = 0.0; // Const
  int var = 0;        // Var index
  std::unique_ptr<Node> lhs, rhs;

  double eval(const std::array<double, 4>& x) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var: return x[std::size_t(var)];
      case Op::Add: return lhs->eval(x) + rhs->eval(x);
      case Op::Sub: return lhs->eval(x) - rhs->eval(x);
      case Op::Mul: return lhs->eval(x) * rhs->eval(x);
      case Op::Div: return lhs->eval(x) / rhs->eval(x);
      case Op::Pow: return std::pow(lhs->eval(x), rhs->eval(x));
      case Op::Neg: return -lhs->eval(x);
      case Op::Sin: return std::sin(lhs->eval(x));
      case Op::Cos: return std::cos(lhs->eval(x));
      case Op::Exp: return std::exp(lhs->eval(x));
    }
    return 0.0;
  }

  // Depth with associative chains flattened: a product of k factors is one
  // level, not k-1 nested ones.
  int depth() const {
    const int g = group();
    if (g != 0) return 1 + std::max(lhs->chain_depth(g), rhs->chain_depth(g));
    int d = 0;
    if (lhs) d = lhs->depth();
    if (rhs) d = std::max(d, rhs->depth());
    return d + 1;
  }

  int group() const {
    if (op == Op::Add || op == Op::Sub) return 1;
    if (op == Op::Mul || op == Op::Div) return 2;
    return 0;
  }

  int chain_depth(int g) const {
    if (group() == g) return std::max(lhs->chain_depth(g), rhs->chain_depth(g));
    return depth();
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

class Parser {
public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression error at position " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr make(Node::Op op, NodePtr l = nullptr, NodePtr r = nullptr) {
    auto n = std::make_unique<Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  NodePtr expr() {
    NodePtr l = term();
    while (true) {
      if (consume('+'))
        l = make(Node::Op::Add, std::move(l), term());
      else if (consume('-'))
        l = make(Node::Op::Sub, std::move(l), term());
      else
        return l;
    }
  }

  NodePtr term() {
    NodePtr l = factor();
    while (true) {
      if (consume('*'))
        l = make(Node::Op::Mul, std::move(l), factor());
      else if (consume('/'))
        l = make(Node::Op::Div, std::move(l), factor());
      else
        return l;
    }
  }

  NodePtr factor() {
    if (consume('-')) return make(Node::Op::Neg, factor());
    if (consume('+')) return factor();
    NodePtr base = primary();
    if (consume('^')) return make(Node::Op::Pow, std::move(base), factor());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident();
    if (consume('(')) {
      NodePtr e = expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    std::size_t end = pos_;
    while (end < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
            s_[end] == 'e' || s_[end] == 'E' ||
            ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
             (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
      ++end;
    try {
      auto n = make(Node::Op::Const);
      n->value = std::stod(s_.substr(pos_, end - pos_));
      pos_ = end;
      return n;
    } catch (const std::exception&) {
      fail("malformed number");
    }
  }

  NodePtr ident() {
    std::size_t end = pos_;
    while (end < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
      ++end;
    const std::string name = s_.substr(pos_, end - pos_);
    pos_ = end;
    if (name == "pi") {
      auto n = make(Node::Op::Const);
      n->value = M_PI;
      return n;
    }
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '0' && name[1] <= '3') {
      auto n = make(Node::Op::Var);
      n->var = name[1] - '0';
      return n;
    }
    Node::Op op;
    if (name == "sin")
      op = Node::Op::Sin;
    else if (name == "cos")
      op = Node::Op::Cos;
    else if (name == "exp")
      op = Node::Op::Exp;
    else
      fail("unknown identifier '" + name + "' (allowed: pi, x0..x3, sin, cos, exp)");
    if (!consume('(')) fail("expected '(' after function name");
    NodePtr arg = expr();
    if (!consume(')')) fail("expected ')'");
    return make(op, std::move(arg));
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

} // namespace

Expression::Expression(std::unique_ptr<Node> root) : root_(std::move(root)) {}
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::~Expression() = default;

Expression Expression::parse(const std::string& text) {
  return Expression(Parser(text).parse());
}

double Expression::eval(const std::array<double, 4>& x) const { return root_->eval(x); }
int Expression::depth() const { return root_->depth(); }

} // namespace cflow
