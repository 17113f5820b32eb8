#pragma once

// Arithmetic expressions in x and y: + − * / ^, unary minus, parentheses,
// sin cos tan exp log abs tanh sqrt cosh sinh, and the constant pi.

#include <string>
#include <string_view>
#include <vector>

namespace momlab::cli {

class Expression {
 public:
  /// Throws ExpressionError with the 1-based column of the offending token.
  static Expression parse(std::string_view text);

  double operator()(double x, double y = 0.0) const;
  bool uses_y() const { return uses_y_; }
  const std::string& text() const { return text_; }

 private:
  enum class Op { constant, var_x, var_y, neg, add, sub, mul, div, pow, call };
  enum class Fn { sin, cos, tan, exp, log, abs, tanh, sqrt, cosh, sinh };
  struct Node {
    Op op;
    double value = 0.0;
    Fn fn = Fn::sin;
    int lhs = -1;
    int rhs = -1;
  };
  friend class Parser;

  double eval(int node, double x, double y) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  bool uses_y_ = false;
  std::string text_;
};

}  // namespace momlab::cli
