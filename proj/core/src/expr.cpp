#include "hwave/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace hwave {

namespace {

[[noreturn]] void fail(std::size_t pos, const std::string& what) {
  std::ostringstream msg;
  msg << "expression error at position " << pos << ": " << what;
  throw InvalidParameter(msg.str());
}

}  // namespace

class ExprParser {
 public:
  ExprParser(const std::string& text, const std::vector<std::string>& variables,
             Expression& out)
      : text_(text), variables_(variables), out_(out) {}

  void run() {
    out_.root_ = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail(pos_, "unexpected trailing input");
    if (out_.nodes_.empty()) fail(0, "empty expression");
  }

 private:
  using Op = Expression::Op;

  int push(Expression::Node n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (eat('+'))
        lhs = push({Op::add, 0.0, lhs, parse_term()});
      else if (eat('-'))
        lhs = push({Op::sub, 0.0, lhs, parse_term()});
      else
        return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (eat('*'))
        lhs = push({Op::mul, 0.0, lhs, parse_unary()});
      else if (eat('/'))
        lhs = push({Op::div, 0.0, lhs, parse_unary()});
      else
        return lhs;
    }
  }

  int parse_unary() {
    if (eat('-')) return push({Op::neg, 0.0, parse_unary(), -1});
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (eat('^')) return push({Op::pow_op, 0.0, base, parse_unary()});
    return base;
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail(pos_, "expected a value");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      const int inner = parse_expr();
      if (!eat(')')) fail(pos_, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail(pos_, std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    const char* start = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start) fail(pos_, "malformed number");
    pos_ += static_cast<std::size_t>(end - start);
    return push({Op::constant, v, -1, -1});
  }

  int parse_ident() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name = text_.substr(start, pos_ - start);

    if (peek() == '(') return parse_call(name, start);

    if (name == "pi") return push({Op::constant, std::numbers::pi, -1, -1});
    if (name == "e") return push({Op::constant, std::numbers::e, -1, -1});
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      if (variables_[i] == name) {
        Expression::Node n{Op::variable, 0.0, static_cast<int>(i), -1};
        return push(n);
      }
    }
    fail(start, "unknown variable '" + name + "'");
  }

  int parse_call(const std::string& name, std::size_t at) {
    struct Fn {
      const char* name;
      Op op;
      int arity;
    };
    static const Fn fns[] = {
        {"sin", Op::sin_f, 1},   {"cos", Op::cos_f, 1},   {"tan", Op::tan_f, 1},
        {"exp", Op::exp_f, 1},   {"log", Op::log_f, 1},   {"sqrt", Op::sqrt_f, 1},
        {"abs", Op::abs_f, 1},   {"sign", Op::sign_f, 1}, {"tanh", Op::tanh_f, 1},
        {"sinh", Op::sinh_f, 1}, {"cosh", Op::cosh_f, 1}, {"min", Op::min_f, 2},
        {"max", Op::max_f, 2},   {"pow", Op::pow_op, 2},  {"atan2", Op::atan2_f, 2},
    };
    const Fn* fn = nullptr;
    for (const Fn& f : fns)
      if (name == f.name) fn = &f;
    if (!fn) fail(at, "unknown function '" + name + "'");

    if (!eat('(')) fail(pos_, "expected '('");
    const int a = parse_expr();
    int b = -1;
    if (fn->arity == 2) {
      if (!eat(',')) fail(pos_, "function '" + name + "' takes two arguments");
      b = parse_expr();
    }
    if (!eat(')')) fail(pos_, "expected ')'");
    return push({fn->op, 0.0, a, b});
  }

  const std::string& text_;
  const std::vector<std::string>& variables_;
  Expression& out_;
  std::size_t pos_ = 0;
};

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables) {
  Expression e;
  ExprParser parser(text, variables, e);
  parser.run();
  return e;
}

double Expression::eval_node(int idx, const double* args) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return args[n.a];
    case Op::add: return eval_node(n.a, args) + eval_node(n.b, args);
    case Op::sub: return eval_node(n.a, args) - eval_node(n.b, args);
    case Op::mul: return eval_node(n.a, args) * eval_node(n.b, args);
    case Op::div: return eval_node(n.a, args) / eval_node(n.b, args);
    case Op::neg: return -eval_node(n.a, args);
    case Op::pow_op: return std::pow(eval_node(n.a, args), eval_node(n.b, args));
    case Op::sin_f: return std::sin(eval_node(n.a, args));
    case Op::cos_f: return std::cos(eval_node(n.a, args));
    case Op::tan_f: return std::tan(eval_node(n.a, args));
    case Op::exp_f: return std::exp(eval_node(n.a, args));
    case Op::log_f: return std::log(eval_node(n.a, args));
    case Op::sqrt_f: return std::sqrt(eval_node(n.a, args));
    case Op::abs_f: return std::abs(eval_node(n.a, args));
    case Op::sign_f: {
      const double v = eval_node(n.a, args);
      return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    }
    case Op::tanh_f: return std::tanh(eval_node(n.a, args));
    case Op::sinh_f: return std::sinh(eval_node(n.a, args));
    case Op::cosh_f: return std::cosh(eval_node(n.a, args));
    case Op::min_f: return std::min(eval_node(n.a, args), eval_node(n.b, args));
    case Op::max_f: return std::max(eval_node(n.a, args), eval_node(n.b, args));
    case Op::atan2_f: return std::atan2(eval_node(n.a, args), eval_node(n.b, args));
  }
  return 0.0;  // unreachable
}

double Expression::evaluate(const double* args) const { return eval_node(root_, args); }

}  // namespace hwave
