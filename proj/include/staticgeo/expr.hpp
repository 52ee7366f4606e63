#pragma once

// Closed-form scalar expressions in named variables: parsing, printing,
// exact symbolic differentiation, and IEEE-double evaluation.
//
// Grammar (whitespace ignored):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' factor)?
//   unary  := '-' unary | atom
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//
// Power with a non-integer exponent is defined for positive bases only;
// integer exponents are allowed for any base.  Trees are immutable and
// all operations on them are pure, so concurrent use needs no locking.
// Simplification is limited to constant folding and the 0/1 absorption
// rules; nothing is rewritten into a canonical form.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "staticgeo/errors.hpp"

namespace staticgeo {

class VarEnv {
public:
  VarEnv() = default;
  VarEnv(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}

  VarEnv& bind(const std::string& name, double value) {
    values_[name] = value;
    return *this;
  }

  std::optional<double> lookup(std::string_view name) const {
    auto it = values_.find(name);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

private:
  std::map<std::string, double, std::less<>> values_;
};

enum class ExprOp {
  Constant,
  Variable,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Neg,
  Exp,
  Log,
  Sqrt,
  Sin,
  Cos,
  Abs,
};

class Expr {
public:
  // Default-constructed expression is the constant 0.
  Expr() : node_(zero_node()) {}

  static Expr constant(double value) {
    if (value == 0.0) return Expr(zero_node());
    if (value == 1.0) return Expr(one_node());
    return Expr(std::make_shared<const Node>(Node{ExprOp::Constant, value, {}, nullptr, nullptr}));
  }

  static Expr variable(std::string name) {
    return Expr(std::make_shared<const Node>(
        Node{ExprOp::Variable, 0.0, std::move(name), nullptr, nullptr}));
  }

  ExprOp op() const { return node_->op; }
  bool is_constant() const { return node_->op == ExprOp::Constant; }
  bool is_constant(double value) const { return is_constant() && node_->value == value; }
  double constant_value() const { return node_->value; }
  const std::string& variable_name() const { return node_->name; }
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }

  std::size_t node_count() const { return count_nodes(node_.get()); }

private:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Node {
    ExprOp op;
    double value;       // Constant
    std::string name;   // Variable
    NodePtr lhs, rhs;   // children; rhs is null for unary ops
  };

  explicit Expr(NodePtr node) : node_(std::move(node)) {}

  static NodePtr zero_node() {
    static const NodePtr z =
        std::make_shared<const Node>(Node{ExprOp::Constant, 0.0, {}, nullptr, nullptr});
    return z;
  }
  static NodePtr one_node() {
    static const NodePtr o =
        std::make_shared<const Node>(Node{ExprOp::Constant, 1.0, {}, nullptr, nullptr});
    return o;
  }

  static std::size_t count_nodes(const Node* n) {
    if (!n) return 0;
    return 1 + count_nodes(n->lhs.get()) + count_nodes(n->rhs.get());
  }

  friend Expr make_binary(ExprOp op, Expr a, Expr b);
  friend Expr make_unary(ExprOp op, Expr a);
  friend double evaluate(const Expr& e, const VarEnv& env);

  NodePtr node_;
};

double evaluate(const Expr& e, const VarEnv& env);

namespace detail {

inline bool is_integer_value(double v) {
  return std::isfinite(v) && v == std::rint(v) && std::abs(v) < 9.007199254740992e15;
}

inline double apply_binary(ExprOp op, double a, double b) {
  switch (op) {
    case ExprOp::Add: return a + b;
    case ExprOp::Sub: return a - b;
    case ExprOp::Mul: return a * b;
    case ExprOp::Div:
      if (b == 0.0) throw EvalError("division by zero");
      return a / b;
    case ExprOp::Pow:
      if (is_integer_value(b)) {
        if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power");
        return std::pow(a, b);
      }
      if (a < 0.0) throw EvalError("negative base with non-integer exponent");
      if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power");
      return std::pow(a, b);
    default: throw EvalError("not a binary operation");
  }
}

inline double apply_unary(ExprOp op, double a) {
  switch (op) {
    case ExprOp::Neg: return -a;
    case ExprOp::Exp: return std::exp(a);
    case ExprOp::Log:
      if (a <= 0.0) throw EvalError("log of non-positive value");
      return std::log(a);
    case ExprOp::Sqrt:
      if (a < 0.0) throw EvalError("sqrt of negative value");
      return std::sqrt(a);
    case ExprOp::Sin: return std::sin(a);
    case ExprOp::Cos: return std::cos(a);
    case ExprOp::Abs: return std::abs(a);
    default: throw EvalError("not a unary operation");
  }
}

}  // namespace detail

// Node factories.  These apply constant folding and the x*0 / x*1 family of
// rules, which is all the simplification this library does.
inline Expr make_binary(ExprOp op, Expr a, Expr b) {
  if (a.is_constant() && b.is_constant()) {
    try {
      double v = detail::apply_binary(op, a.constant_value(), b.constant_value());
      if (std::isfinite(v)) return Expr::constant(v);
    } catch (const EvalError&) {
      // keep the node; the error belongs to evaluation time
    }
  }
  switch (op) {
    case ExprOp::Add:
      if (a.is_constant(0.0)) return b;
      if (b.is_constant(0.0)) return a;
      break;
    case ExprOp::Sub:
      if (b.is_constant(0.0)) return a;
      if (a.is_constant(0.0)) return make_unary(ExprOp::Neg, b);
      break;
    case ExprOp::Mul:
      if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
      if (a.is_constant(1.0)) return b;
      if (b.is_constant(1.0)) return a;
      break;
    case ExprOp::Div:
      if (a.is_constant(0.0)) return Expr::constant(0.0);
      if (b.is_constant(1.0)) return a;
      break;
    case ExprOp::Pow:
      if (b.is_constant(1.0)) return a;
      if (b.is_constant(0.0)) return Expr::constant(1.0);
      break;
    default:
      throw InvalidArgument("make_binary: not a binary op");
  }
  return Expr(std::make_shared<const Expr::Node>(
      Expr::Node{op, 0.0, {}, a.node_, b.node_}));
}

inline Expr make_unary(ExprOp op, Expr a) {
  if (a.is_constant()) {
    try {
      double v = detail::apply_unary(op, a.constant_value());
      if (std::isfinite(v)) return Expr::constant(v);
    } catch (const EvalError&) {
    }
  }
  if (op == ExprOp::Neg && a.op() == ExprOp::Neg) return a.lhs();
  return Expr(std::make_shared<const Expr::Node>(
      Expr::Node{op, 0.0, {}, a.node_, nullptr}));
}

inline Expr operator+(Expr a, Expr b) { return make_binary(ExprOp::Add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return make_binary(ExprOp::Sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return make_binary(ExprOp::Mul, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return make_binary(ExprOp::Div, std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return make_unary(ExprOp::Neg, std::move(a)); }
inline Expr pow(Expr a, Expr b) { return make_binary(ExprOp::Pow, std::move(a), std::move(b)); }
inline Expr pow(Expr a, double b) { return pow(std::move(a), Expr::constant(b)); }
inline Expr exp(Expr a) { return make_unary(ExprOp::Exp, std::move(a)); }
inline Expr log(Expr a) { return make_unary(ExprOp::Log, std::move(a)); }
inline Expr sqrt(Expr a) { return make_unary(ExprOp::Sqrt, std::move(a)); }
inline Expr sin(Expr a) { return make_unary(ExprOp::Sin, std::move(a)); }
inline Expr cos(Expr a) { return make_unary(ExprOp::Cos, std::move(a)); }
inline Expr abs(Expr a) { return make_unary(ExprOp::Abs, std::move(a)); }

inline double evaluate(const Expr& e, const VarEnv& env) {
  switch (e.op()) {
    case ExprOp::Constant: return e.constant_value();
    case ExprOp::Variable: {
      auto v = env.lookup(e.variable_name());
      if (!v) throw EvalError("unbound variable '" + e.variable_name() + "'");
      return *v;
    }
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul:
    case ExprOp::Div:
    case ExprOp::Pow:
      return detail::apply_binary(e.op(), evaluate(e.lhs(), env), evaluate(e.rhs(), env));
    default:
      return detail::apply_unary(e.op(), evaluate(e.lhs(), env));
  }
}

// Exact symbolic derivative.  Repeated application yields higher orders.
// d|x| is represented as x/|x| * dx, which correctly raises a domain error
// when evaluated at x = 0.
inline Expr differentiate(const Expr& e, std::string_view var) {
  switch (e.op()) {
    case ExprOp::Constant: return Expr::constant(0.0);
    case ExprOp::Variable: return Expr::constant(e.variable_name() == var ? 1.0 : 0.0);
    case ExprOp::Add: return differentiate(e.lhs(), var) + differentiate(e.rhs(), var);
    case ExprOp::Sub: return differentiate(e.lhs(), var) - differentiate(e.rhs(), var);
    case ExprOp::Mul: {
      Expr a = e.lhs(), b = e.rhs();
      return differentiate(a, var) * b + a * differentiate(b, var);
    }
    case ExprOp::Div: {
      Expr a = e.lhs(), b = e.rhs();
      return (differentiate(a, var) * b - a * differentiate(b, var)) / (b * b);
    }
    case ExprOp::Pow: {
      Expr a = e.lhs(), b = e.rhs();
      if (b.is_constant()) {
        double c = b.constant_value();
        return Expr::constant(c) * pow(a, Expr::constant(c - 1.0)) * differentiate(a, var);
      }
      // a^b = exp(b log a); requires a > 0 at evaluation time anyway.
      return pow(a, b) * (differentiate(b, var) * log(a) + b * differentiate(a, var) / a);
    }
    case ExprOp::Neg: return -differentiate(e.lhs(), var);
    case ExprOp::Exp: return exp(e.lhs()) * differentiate(e.lhs(), var);
    case ExprOp::Log: return differentiate(e.lhs(), var) / e.lhs();
    case ExprOp::Sqrt:
      return differentiate(e.lhs(), var) / (Expr::constant(2.0) * sqrt(e.lhs()));
    case ExprOp::Sin: return cos(e.lhs()) * differentiate(e.lhs(), var);
    case ExprOp::Cos: return -(sin(e.lhs()) * differentiate(e.lhs(), var));
    case ExprOp::Abs: {
      Expr a = e.lhs();
      return a / abs(a) * differentiate(a, var);
    }
  }
  throw InvalidArgument("differentiate: unknown node");
}

// Replace a variable by a constant, re-folding along the way.
inline Expr substitute(const Expr& e, std::string_view var, double value) {
  switch (e.op()) {
    case ExprOp::Constant: return e;
    case ExprOp::Variable:
      return e.variable_name() == var ? Expr::constant(value) : e;
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul:
    case ExprOp::Div:
    case ExprOp::Pow:
      return make_binary(e.op(), substitute(e.lhs(), var, value), substitute(e.rhs(), var, value));
    default:
      return make_unary(e.op(), substitute(e.lhs(), var, value));
  }
}

namespace detail {

inline const char* function_name(ExprOp op) {
  switch (op) {
    case ExprOp::Exp: return "exp";
    case ExprOp::Log: return "log";
    case ExprOp::Sqrt: return "sqrt";
    case ExprOp::Sin: return "sin";
    case ExprOp::Cos: return "cos";
    case ExprOp::Abs: return "abs";
    default: return nullptr;
  }
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Print levels chosen so that re-parsing under the grammar above recovers a
// tree with identical evaluation.  Note '-' binds tighter than '^' in the
// grammar, so the operand of an explicit negation must be atom-level.
inline int print_level(ExprOp op) {
  switch (op) {
    case ExprOp::Add:
    case ExprOp::Sub: return 1;
    case ExprOp::Mul:
    case ExprOp::Div: return 2;
    case ExprOp::Neg: return 3;
    case ExprOp::Pow: return 4;
    default: return 5;
  }
}

inline void print_node(const Expr& e, int min_level, std::string& out) {
  const int level = print_level(e.op());
  const bool parens = level < min_level;
  if (parens) out += '(';
  switch (e.op()) {
    case ExprOp::Constant: out += format_double(e.constant_value()); break;
    case ExprOp::Variable: out += e.variable_name(); break;
    case ExprOp::Add:
      print_node(e.lhs(), 1, out);
      out += " + ";
      print_node(e.rhs(), 2, out);
      break;
    case ExprOp::Sub:
      print_node(e.lhs(), 1, out);
      out += " - ";
      print_node(e.rhs(), 2, out);
      break;
    case ExprOp::Mul:
      print_node(e.lhs(), 2, out);
      out += '*';
      print_node(e.rhs(), 3, out);
      break;
    case ExprOp::Div:
      print_node(e.lhs(), 2, out);
      out += '/';
      print_node(e.rhs(), 3, out);
      break;
    case ExprOp::Pow:
      print_node(e.lhs(), 5, out);
      out += '^';
      print_node(e.rhs(), 3, out);
      break;
    case ExprOp::Neg:
      out += '-';
      print_node(e.lhs(), 5, out);
      break;
    default:
      out += function_name(e.op());
      out += '(';
      print_node(e.lhs(), 0, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& message) const {
    std::size_t at = pos_;
    if (at >= src_.size()) at = src_.empty() ? 0 : src_.size() - 1;
    throw ParseError("syntax error: " + message, at);
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (consume('+')) {
        e = e + parse_term();
      } else if (consume('-')) {
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (consume('*')) {
        e = e * parse_factor();
      } else if (consume('/')) {
        e = e / parse_factor();
      } else {
        return e;
      }
    }
  }

  Expr parse_factor() {
    Expr base = parse_unary();
    if (consume('^')) return pow(std::move(base), parse_factor());
    return base;
  }

  Expr parse_unary() {
    if (consume('-')) return -parse_unary();
    return parse_atom();
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (is_ident_start(c)) return parse_ident();
    fail("unexpected character");
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  }
  static bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
  }

  Expr parse_number() {
    double value = 0.0;
    const char* first = src_.data() + pos_;
    const char* last = src_.data() + src_.size();
    auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
    if (ec != std::errc() || ptr == first) fail("invalid number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return Expr::constant(value);
  }

  Expr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    if (peek_is('(')) {
      ExprOp op;
      if (name == "exp") op = ExprOp::Exp;
      else if (name == "log") op = ExprOp::Log;
      else if (name == "sqrt") op = ExprOp::Sqrt;
      else if (name == "sin") op = ExprOp::Sin;
      else if (name == "cos") op = ExprOp::Cos;
      else if (name == "abs") op = ExprOp::Abs;
      else throw ParseError("unknown function '" + name + "'", start);
      ++pos_;
      Expr arg = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return make_unary(op, std::move(arg));
    }
    return Expr::variable(std::move(name));
  }
};

}  // namespace detail

inline Expr parse(std::string_view source) { return detail::Parser(source).parse(); }

inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print_node(e, 0, out);
  return out;
}

}  // namespace staticgeo
