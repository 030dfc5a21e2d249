/// @file test_expr.cpp
/// @brief Expression parser: values, precedence, symbolic derivatives, errors.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kgflow/expr.hpp"

using namespace kgflow;

TEST_CASE("literals, precedence, and right-associative power") {
  CHECK(Expr::parse("2 + 3 * 4^2")(0.0) == doctest::Approx(50.0));
  CHECK(Expr::parse("2^3^2")(0.0) == doctest::Approx(512.0));  // 2^(3^2)
  CHECK(Expr::parse("-x^2")(3.0) == doctest::Approx(-9.0));
  CHECK(Expr::parse("(2 + 3) * 4")(0.0) == doctest::Approx(20.0));
  CHECK(Expr::parse("7 / 2 / 2")(0.0) == doctest::Approx(1.75));
}

TEST_CASE("constants and functions") {
  CHECK(Expr::parse("pi")(0.0) == doctest::Approx(M_PI));
  CHECK(Expr::parse("e")(0.0) == doctest::Approx(std::exp(1.0)));
  CHECK(Expr::parse("sin(x)^2 + cos(x)^2")(0.7) == doctest::Approx(1.0));
  CHECK(Expr::parse("log(exp(x))")(1.3) == doctest::Approx(1.3));
  CHECK(Expr::parse("sqrt(x^2)")(2.5) == doctest::Approx(2.5));
  CHECK(Expr::parse("tan(x)")(0.3) == doctest::Approx(std::tan(0.3)));
}

TEST_CASE("variable aliases map onto the two chart coordinates") {
  const Expr f = Expr::parse("x + 10*z");
  CHECK(f(1.0, 2.0) == doctest::Approx(21.0));
  CHECK(Expr::parse("r")(3.0, 0.0) == doctest::Approx(3.0));
  CHECK(Expr::parse("x1 + x2")(1.0, 2.0) == doctest::Approx(3.0));
}

TEST_CASE("max_variable reports the highest coordinate used") {
  CHECK(Expr::parse("3.5").max_variable() == -1);
  CHECK(Expr::parse("sin(x)").max_variable() == 0);
  CHECK(Expr::parse("x + z^2").max_variable() == 1);
}

TEST_CASE("constant_value folds pure-constant trees") {
  double v = 0.0;
  CHECK(Expr::parse("2 * pi").constant_value(&v));
  CHECK(v == doctest::Approx(2.0 * M_PI));
  CHECK_FALSE(Expr::parse("2 * x").constant_value(&v));
}

TEST_CASE("symbolic derivatives agree with central differences") {
  const char* cases[] = {"x^3 - 2*x", "sin(2*x) * exp(-x)", "log(1 + x^2)",
                         "sqrt(1 + x^2)", "tan(x/2)", "x / (1 + x)"};
  for (const char* text : cases) {
    CAPTURE(text);
    const Expr f = Expr::parse(text);
    const Expr df = f.derivative(0);
    const double h = 1e-6;
    for (double x : {-0.8, 0.1, 0.9}) {
      const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
      CHECK(df(x) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("partial derivatives in two variables") {
  const Expr f = Expr::parse("sin(x1 * x2) + x2^2");
  const Expr fx = f.derivative(0);
  const Expr fz = f.derivative(1);
  const double x = 0.4, z = 1.2;
  CHECK(fx(x, z) == doctest::Approx(z * std::cos(x * z)));
  CHECK(fz(x, z) == doctest::Approx(x * std::cos(x * z) + 2.0 * z));
}

TEST_CASE("second derivative via repeated differentiation") {
  const Expr f = Expr::parse("exp(2*x)");
  const Expr fxx = f.derivative(0).derivative(0);
  CHECK(fxx(0.3) == doctest::Approx(4.0 * std::exp(0.6)));
}

TEST_CASE("parse errors carry the offending column") {
  CHECK_THROWS_AS(Expr::parse("sin("), ExprError);
  CHECK_THROWS_AS(Expr::parse("2 +"), ExprError);
  CHECK_THROWS_AS(Expr::parse("bogus(x)"), ExprError);
  CHECK_THROWS_AS(Expr::parse("x y"), ExprError);
  try {
    Expr::parse("1 + @");
    CHECK(false);
  } catch (const ExprError& e) {
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
}
