/// @file expr.cpp
/// @brief Recursive-descent parser, evaluator and symbolic derivative.

#include "kgflow/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace kgflow {

namespace {

enum class Kind { number, variable, neg, add, sub, mul, div, pow, call };
enum class Fn { sin, cos, tan, exp, log, sqrt };

}  // namespace

struct Expr::Node {
  Kind kind = Kind::number;
  double value = 0.0;  // number
  int var = 0;         // variable
  Fn fn = Fn::sin;     // call
  NodeP a, b;
};

namespace {

using NodeP = std::shared_ptr<const Expr::Node>;

NodeP make_num(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::number;
  n->value = v;
  return n;
}

NodeP make_var(int var) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::variable;
  n->var = var;
  return n;
}

bool is_num(const NodeP& n, double v) {
  return n->kind == Kind::number && n->value == v;
}

bool both_num(const NodeP& a, const NodeP& b) {
  return a->kind == Kind::number && b->kind == Kind::number;
}

NodeP make_node(Kind k, NodeP a, NodeP b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodeP make_neg(NodeP a);

NodeP make_add(NodeP a, NodeP b) {
  if (both_num(a, b)) return make_num(a->value + b->value);
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  return make_node(Kind::add, std::move(a), std::move(b));
}

NodeP make_sub(NodeP a, NodeP b) {
  if (both_num(a, b)) return make_num(a->value - b->value);
  if (is_num(b, 0.0)) return a;
  if (is_num(a, 0.0)) return make_neg(std::move(b));
  return make_node(Kind::sub, std::move(a), std::move(b));
}

NodeP make_mul(NodeP a, NodeP b) {
  if (both_num(a, b)) return make_num(a->value * b->value);
  if (is_num(a, 0.0) || is_num(b, 0.0)) return make_num(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  return make_node(Kind::mul, std::move(a), std::move(b));
}

NodeP make_div(NodeP a, NodeP b) {
  if (both_num(a, b) && b->value != 0.0) return make_num(a->value / b->value);
  if (is_num(a, 0.0)) return make_num(0.0);
  if (is_num(b, 1.0)) return a;
  return make_node(Kind::div, std::move(a), std::move(b));
}

NodeP make_pow(NodeP a, NodeP b) {
  if (both_num(a, b)) return make_num(std::pow(a->value, b->value));
  if (is_num(b, 0.0)) return make_num(1.0);
  if (is_num(b, 1.0)) return a;
  return make_node(Kind::pow, std::move(a), std::move(b));
}

NodeP make_neg(NodeP a) {
  if (a->kind == Kind::number) return make_num(-a->value);
  if (a->kind == Kind::neg) return a->a;
  return make_node(Kind::neg, std::move(a));
}

NodeP make_call(Fn fn, NodeP a) {
  if (a->kind == Kind::number) {
    switch (fn) {
      case Fn::sin: return make_num(std::sin(a->value));
      case Fn::cos: return make_num(std::cos(a->value));
      case Fn::tan: return make_num(std::tan(a->value));
      case Fn::exp: return make_num(std::exp(a->value));
      case Fn::log: return make_num(std::log(a->value));
      case Fn::sqrt: return make_num(std::sqrt(a->value));
    }
  }
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::call;
  n->fn = fn;
  n->a = std::move(a);
  return n;
}

// ---------------------------------------------------------------- parsing

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodeP run() {
    NodeP e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ExprError(msg, pos_ + 1);
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

  NodeP parse_expr() {
    NodeP e = parse_term();
    for (;;) {
      if (eat('+')) {
        e = make_add(e, parse_term());
      } else if (eat('-')) {
        e = make_sub(e, parse_term());
      } else {
        return e;
      }
    }
  }

  NodeP parse_term() {
    NodeP e = parse_factor();
    for (;;) {
      if (eat('*')) {
        e = make_mul(e, parse_factor());
      } else if (eat('/')) {
        e = make_div(e, parse_factor());
      } else {
        return e;
      }
    }
  }

  NodeP parse_factor() {
    // Unary sign binds looser than '^', so -x^2 means -(x^2); the
    // recursive exponent still admits its own sign (2^-3).
    bool negate = false;
    for (;;) {
      if (eat('-')) {
        negate = !negate;
      } else if (eat('+')) {
        // no-op
      } else {
        break;
      }
    }
    NodeP base = parse_primary();
    if (eat('^')) base = make_pow(base, parse_factor());  // right-associative
    return negate ? make_neg(base) : base;
  }

  NodeP parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::string name = parse_identifier();
      if (name == "pi") return make_num(M_PI);
      if (name == "e") return make_num(M_E);
      if (name == "x1" || name == "x" || name == "r") return make_var(0);
      if (name == "x2" || name == "z") return make_var(1);

      Fn fn;
      if (name == "sin") fn = Fn::sin;
      else if (name == "cos") fn = Fn::cos;
      else if (name == "tan") fn = Fn::tan;
      else if (name == "exp") fn = Fn::exp;
      else if (name == "log") fn = Fn::log;
      else if (name == "sqrt") fn = Fn::sqrt;
      else fail("unknown identifier '" + name + "'");

      if (!eat('(')) fail("expected '(' after function name '" + name + "'");
      NodeP arg = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return make_call(fn, arg);
    }

    if (eat('(')) {
      NodeP e = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }

    fail(std::string("unexpected character '") + c + "'");
  }

  NodeP parse_number() {
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_num(v);
  }

  std::string parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ------------------------------------------------------------- evaluation

double eval_node(const Expr::Node& n, double x1, double x2) {
  switch (n.kind) {
    case Kind::number: return n.value;
    case Kind::variable: return n.var == 0 ? x1 : x2;
    case Kind::neg: return -eval_node(*n.a, x1, x2);
    case Kind::add: return eval_node(*n.a, x1, x2) + eval_node(*n.b, x1, x2);
    case Kind::sub: return eval_node(*n.a, x1, x2) - eval_node(*n.b, x1, x2);
    case Kind::mul: return eval_node(*n.a, x1, x2) * eval_node(*n.b, x1, x2);
    case Kind::div: return eval_node(*n.a, x1, x2) / eval_node(*n.b, x1, x2);
    case Kind::pow: return std::pow(eval_node(*n.a, x1, x2), eval_node(*n.b, x1, x2));
    case Kind::call: {
      const double a = eval_node(*n.a, x1, x2);
      switch (n.fn) {
        case Fn::sin: return std::sin(a);
        case Fn::cos: return std::cos(a);
        case Fn::tan: return std::tan(a);
        case Fn::exp: return std::exp(a);
        case Fn::log: return std::log(a);
        case Fn::sqrt: return std::sqrt(a);
      }
    }
  }
  return 0.0;
}

// ------------------------------------------------------------ derivative

NodeP diff(const NodeP& n, int var) {
  switch (n->kind) {
    case Kind::number: return make_num(0.0);
    case Kind::variable: return make_num(n->var == var ? 1.0 : 0.0);
    case Kind::neg: return make_neg(diff(n->a, var));
    case Kind::add: return make_add(diff(n->a, var), diff(n->b, var));
    case Kind::sub: return make_sub(diff(n->a, var), diff(n->b, var));
    case Kind::mul:
      return make_add(make_mul(diff(n->a, var), n->b), make_mul(n->a, diff(n->b, var)));
    case Kind::div:
      // (a/b)' = a'/b - a b'/b^2
      return make_sub(make_div(diff(n->a, var), n->b),
                      make_div(make_mul(n->a, diff(n->b, var)), make_mul(n->b, n->b)));
    case Kind::pow: {
      if (n->b->kind == Kind::number) {
        const double c = n->b->value;
        return make_mul(make_num(c),
                        make_mul(make_pow(n->a, make_num(c - 1.0)), diff(n->a, var)));
      }
      // a^b = exp(b log a):  (a^b)' = a^b (b' log a + b a'/a)
      NodeP term = make_add(make_mul(diff(n->b, var), make_call(Fn::log, n->a)),
                            make_div(make_mul(n->b, diff(n->a, var)), n->a));
      return make_mul(make_pow(n->a, n->b), term);
    }
    case Kind::call: {
      NodeP da = diff(n->a, var);
      switch (n->fn) {
        case Fn::sin: return make_mul(make_call(Fn::cos, n->a), da);
        case Fn::cos: return make_neg(make_mul(make_call(Fn::sin, n->a), da));
        case Fn::tan:
          return make_div(da, make_pow(make_call(Fn::cos, n->a), make_num(2.0)));
        case Fn::exp: return make_mul(make_call(Fn::exp, n->a), da);
        case Fn::log: return make_div(da, n->a);
        case Fn::sqrt:
          return make_div(da, make_mul(make_num(2.0), make_call(Fn::sqrt, n->a)));
      }
    }
  }
  return make_num(0.0);
}

int max_var_node(const Expr::Node& n) {
  switch (n.kind) {
    case Kind::number: return -1;
    case Kind::variable: return n.var;
    case Kind::neg:
    case Kind::call: return max_var_node(*n.a);
    default: return std::max(max_var_node(*n.a), max_var_node(*n.b));
  }
}

}  // namespace

Expr::Expr() : root_(make_num(0.0)) {}
Expr::Expr(NodeP root) : root_(std::move(root)) {}

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).run()); }

Expr Expr::constant(double v) { return Expr(make_num(v)); }

double Expr::operator()(double x1, double x2) const { return eval_node(*root_, x1, x2); }

Expr Expr::derivative(int var) const { return Expr(diff(root_, var)); }

bool Expr::constant_value(double* out) const {
  if (root_->kind != Kind::number) return false;
  if (out) *out = root_->value;
  return true;
}

int Expr::max_variable() const { return max_var_node(*root_); }

}  // namespace kgflow
