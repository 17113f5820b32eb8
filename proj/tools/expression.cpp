#include "expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "cli_errors.hpp"

namespace momlab::cli {

// Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | '+' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
class Parser {
 public:
  Parser(std::string_view s, Expression& e) : s_(s), e_(e) {}

  int parse() {
    const int root = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return root;
  }

 private:
  using Op = Expression::Op;
  using Fn = Expression::Fn;

  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError(what + " at column " + std::to_string(pos_ + 1) + " in '" +
                          std::string(s_) + "'");
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

  int node(Expression::Node n) {
    e_.nodes_.push_back(n);
    return static_cast<int>(e_.nodes_.size()) - 1;
  }

  int binary(Op op, int a, int b) { return node({op, 0.0, Fn::sin, a, b}); }

  int expr() {
    int a = term();
    for (;;) {
      if (accept('+')) {
        a = binary(Op::add, a, term());
      } else if (accept('-')) {
        a = binary(Op::sub, a, term());
      } else {
        return a;
      }
    }
  }

  int term() {
    int a = unary();
    for (;;) {
      if (accept('*')) {
        a = binary(Op::mul, a, unary());
      } else if (accept('/')) {
        a = binary(Op::div, a, unary());
      } else {
        return a;
      }
    }
  }

  int unary() {
    if (accept('-')) return node({Op::neg, 0.0, Fn::sin, unary(), -1});
    if (accept('+')) return unary();
    return power();
  }

  int power() {
    const int base = atom();
    if (accept('^')) return binary(Op::pow, base, unary());
    return base;
  }

  int atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    if (accept('(')) {
      const int inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  int number() {
    double v = 0.0;
    const auto r = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (r.ec != std::errc()) fail("malformed number");
    pos_ = static_cast<std::size_t>(r.ptr - s_.data());
    return node({Op::constant, v});
  }

  int name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string_view id = s_.substr(start, pos_ - start);
    if (id == "x") return node({Op::var_x});
    if (id == "y") {
      e_.uses_y_ = true;
      return node({Op::var_y});
    }
    if (id == "pi") return node({Op::constant, 3.141592653589793});
    static constexpr struct {
      std::string_view name;
      Fn fn;
    } kFns[] = {{"sin", Fn::sin},   {"cos", Fn::cos},   {"tan", Fn::tan},   {"exp", Fn::exp},
                {"log", Fn::log},   {"abs", Fn::abs},   {"tanh", Fn::tanh}, {"sqrt", Fn::sqrt},
                {"cosh", Fn::cosh}, {"sinh", Fn::sinh}};
    for (const auto& f : kFns) {
      if (id != f.name) continue;
      if (!accept('(')) fail("expected '(' after " + std::string(id));
      const int arg = expr();
      if (!accept(')')) fail("expected ')'");
      return node({Op::call, 0.0, f.fn, arg, -1});
    }
    pos_ = start;
    fail("unknown name '" + std::string(id) + "'");
  }

  std::string_view s_;
  Expression& e_;
  std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.text_ = std::string(text);
  Parser p(e.text_, e);
  e.root_ = p.parse();
  return e;
}

double Expression::operator()(double x, double y) const { return eval(root_, x, y); }

double Expression::eval(int i, double x, double y) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::var_x: return x;
    case Op::var_y: return y;
    case Op::neg: return -eval(n.lhs, x, y);
    case Op::add: return eval(n.lhs, x, y) + eval(n.rhs, x, y);
    case Op::sub: return eval(n.lhs, x, y) - eval(n.rhs, x, y);
    case Op::mul: return eval(n.lhs, x, y) * eval(n.rhs, x, y);
    case Op::div: return eval(n.lhs, x, y) / eval(n.rhs, x, y);
    case Op::pow: return std::pow(eval(n.lhs, x, y), eval(n.rhs, x, y));
    case Op::call: break;
  }
  const double a = eval(n.lhs, x, y);
  switch (n.fn) {
    case Fn::sin: return std::sin(a);
    case Fn::cos: return std::cos(a);
    case Fn::tan: return std::tan(a);
    case Fn::exp: return std::exp(a);
    case Fn::log: return std::log(a);
    case Fn::abs: return std::abs(a);
    case Fn::tanh: return std::tanh(a);
    case Fn::sqrt: return std::sqrt(a);
    case Fn::cosh: return std::cosh(a);
    case Fn::sinh: return std::sinh(a);
  }
  throw std::logic_error("unreachable expression node");
}

}  // namespace momlab::cli
