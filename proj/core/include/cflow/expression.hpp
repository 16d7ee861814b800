#pragma once

#include <array>
#include <memory>
#include <string>

#include "cflow/errors.hpp"

namespace cflow {

/// Closed-form scalar expressions over the node coordinates x0..x3:
/// arithmetic (+ - * / ^), sin, cos, exp, pi and numeric literals. This is
/// the whole config-side metric language; anything richer goes through the
/// library API.
class Expression {
public:
  static Expression parse(const std::string& text);

  double eval(const std::array<double, 4>& x) const;
  int depth() const;

  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;
  ~Expression();

  struct Node; // defined in expression.cpp

private:
  explicit Expression(std::unique_ptr<Node> root);
  std::unique_ptr<Node> root_;
};

} // namespace cflow
