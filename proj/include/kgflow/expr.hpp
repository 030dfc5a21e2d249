#pragma once

/// @file expr.hpp
/// @brief Scalar expression grammar used by scenario configs.
///
/// Grammar (whitespace-insensitive):
///   expr    := term (('+' | '-') term)*
///   term    := factor (('*' | '/') factor)*
///   factor  := unary ('^' factor)?            -- '^' is right-associative
///   unary   := ('+' | '-')* primary
///   primary := NUMBER | CONST | VAR | FUNC '(' expr ')' | '(' expr ')'
///
/// Functions: sin cos tan exp log sqrt.  Constants: pi, e.
/// Variables: x1, x2 with aliases x -> x1, r -> x1, z -> x2.
///
/// Parsed trees can be differentiated symbolically, which is how user
/// geometries obtain exact gamma gradients and Christoffel symbols.

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kgflow/tensor.hpp"

namespace kgflow {

/// Parse failure; column is 1-based within the expression text.
class ExprError : public std::runtime_error {
 public:
  ExprError(const std::string& msg, std::size_t column)
      : std::runtime_error(msg + " (column " + std::to_string(column) + ")"),
        column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class Expr {
 public:
  Expr();  // the constant 0
  static Expr parse(std::string_view text);
  static Expr constant(double v);

  double operator()(double x1, double x2 = 0.0) const;
  double operator()(const Vec& x) const { return (*this)(x[0], x[1]); }

  /// d/dx_{var} as a new tree (var is 0 or 1); constant-folds aggressively.
  Expr derivative(int var) const;

  /// True when the tree folds to a constant; writes the value if requested.
  bool constant_value(double* out = nullptr) const;

  /// Highest variable index referenced, or -1 for constants.
  int max_variable() const;

  struct Node;  // opaque

 private:
  using NodeP = std::shared_ptr<const Node>;
  explicit Expr(NodeP root);
  NodeP root_;
};

}  // namespace kgflow
