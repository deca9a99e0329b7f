#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "tow/geometry.hpp"

namespace tow {

namespace detail {

enum class ExprOp { num, var, neg, add, sub, mul, div, sin, cos, exp, abs };

struct ExprNode {
  ExprOp op;
  double value = 0;  // num
  int var = 0;       // var: 0 x, 1 y, 2 nrm
  int a = -1, b = -1;
};

inline double eval_expr(const std::vector<ExprNode>& nodes, int id, const double vars[3]) {
  const ExprNode& n = nodes[static_cast<std::size_t>(id)];
  switch (n.op) {
    case ExprOp::num: return n.value;
    case ExprOp::var: return vars[n.var];
    case ExprOp::neg: return -eval_expr(nodes, n.a, vars);
    case ExprOp::add: return eval_expr(nodes, n.a, vars) + eval_expr(nodes, n.b, vars);
    case ExprOp::sub: return eval_expr(nodes, n.a, vars) - eval_expr(nodes, n.b, vars);
    case ExprOp::mul: return eval_expr(nodes, n.a, vars) * eval_expr(nodes, n.b, vars);
    case ExprOp::div: {
      double den = eval_expr(nodes, n.b, vars);
      if (den == 0) throw EvalError("division by zero");
      return eval_expr(nodes, n.a, vars) / den;
    }
    case ExprOp::sin: return std::sin(eval_expr(nodes, n.a, vars));
    case ExprOp::cos: return std::cos(eval_expr(nodes, n.a, vars));
    case ExprOp::exp: return std::exp(eval_expr(nodes, n.a, vars));
    case ExprOp::abs: return std::abs(eval_expr(nodes, n.a, vars));
  }
  throw EvalError("corrupt expression node");
}

struct ExprParser {
  const std::string& s;
  std::vector<ExprNode>& nodes;
  std::size_t pos = 0;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  int push(ExprNode n) {
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
  }

  int expr() {
    int lhs = term();
    for (;;) {
      if (eat('+'))
        lhs = push({ExprOp::add, 0, 0, lhs, term()});
      else if (eat('-'))
        lhs = push({ExprOp::sub, 0, 0, lhs, term()});
      else
        return lhs;
    }
  }

  int term() {
    int lhs = unary();
    for (;;) {
      if (eat('*'))
        lhs = push({ExprOp::mul, 0, 0, lhs, unary()});
      else if (eat('/'))
        lhs = push({ExprOp::div, 0, 0, lhs, unary()});
      else
        return lhs;
    }
  }

  int unary() {
    if (eat('-')) return push({ExprOp::neg, 0, 0, unary(), -1});
    return primary();
  }

  int primary() {
    skip();
    if (pos >= s.size()) throw SyntaxError("unexpected end of expression", pos);
    char c = s[pos];
    if (c == '(') {
      ++pos;
      int inner = expr();
      if (!eat(')')) throw SyntaxError("expected ')'", pos);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw SyntaxError(std::string("unexpected character '") + c + "'", pos);
  }

  int number() {
    double value = 0;
    const char* begin = s.data() + pos;
    auto [rest, ec] = std::from_chars(begin, s.data() + s.size(), value);
    if (ec != std::errc()) throw SyntaxError("malformed number", pos);
    pos += static_cast<std::size_t>(rest - begin);
    return push({ExprOp::num, value, 0, -1, -1});
  }

  int identifier() {
    std::size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    std::string name = s.substr(start, pos - start);
    if (eat('(')) {
      ExprOp op;
      if (name == "sin")
        op = ExprOp::sin;
      else if (name == "cos")
        op = ExprOp::cos;
      else if (name == "exp")
        op = ExprOp::exp;
      else if (name == "abs")
        op = ExprOp::abs;
      else
        throw UnknownIdentifier("unknown function '" + name + "'");
      int arg = expr();
      if (!eat(')')) throw SyntaxError("expected ')'", pos);
      return push({op, 0, 0, arg, -1});
    }
    if (name == "x") return push({ExprOp::var, 0, 0, -1, -1});
    if (name == "y") return push({ExprOp::var, 0, 1, -1, -1});
    if (name == "nrm") return push({ExprOp::var, 0, 2, -1, -1});
    throw UnknownIdentifier("unknown identifier '" + name + "'");
  }
};

}  // namespace detail

// Parsed boundary expression over x, y, nrm (= |x|), literals, + - * /,
// unary -, sin/cos/exp/abs, and parentheses. In one dimension y evaluates
// to 0. Copyable; evaluation never yields a non-finite value.
class BoundaryExpr {
 public:
  double eval(const Vec& p) const {
    double vars[3] = {p[0], p.dim() > 1 ? p[1] : 0.0, norm(p)};
    double v = detail::eval_expr(nodes_, root_, vars);
    if (!std::isfinite(v)) throw EvalError("expression produced a non-finite value");
    return v;
  }

  const std::string& source() const { return source_; }

 private:
  friend BoundaryExpr parse_boundary_expr(const std::string& src);

  std::vector<detail::ExprNode> nodes_;
  int root_ = -1;
  std::string source_;
};

inline BoundaryExpr parse_boundary_expr(const std::string& src) {
  BoundaryExpr e;
  e.source_ = src;
  detail::ExprParser p{src, e.nodes_};
  e.root_ = p.expr();
  p.skip();
  if (p.pos != src.size()) throw SyntaxError("trailing input", p.pos);
  return e;
}

}  // namespace tow
