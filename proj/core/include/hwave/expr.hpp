#pragma once

#include <string>
#include <vector>

#include "hwave/errors.hpp"

namespace hwave {

/// Compiled arithmetic expression over named variables.
///
/// Grammar: + - * / ^ (right-associative), unary +/-, parentheses, numeric
/// literals, the constants pi and e, and the functions sin cos tan exp log
/// sqrt abs sign tanh sinh cosh (one argument) and min max pow atan2 (two).
/// Parse errors raise InvalidParameter with the offending position.
class Expression {
 public:
  static Expression parse(const std::string& text, const std::vector<std::string>& variables);

  /// args must hold one value per variable, in declaration order.
  double evaluate(const double* args) const;

 private:
  enum class Op : unsigned char {
    constant, variable, add, sub, mul, div, neg, pow_op,
    sin_f, cos_f, tan_f, exp_f, log_f, sqrt_f, abs_f, sign_f,
    tanh_f, sinh_f, cosh_f, min_f, max_f, atan2_f,
  };
  struct Node {
    Op op;
    double value = 0.0;  // constant payload
    int a = -1, b = -1;  // child indices, or variable index in `a`
  };

  double eval_node(int idx, const double* args) const;

  std::vector<Node> nodes_;
  int root_ = -1;

  friend class ExprParser;
};

}  // namespace hwave
