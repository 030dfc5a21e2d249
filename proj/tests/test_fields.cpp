/// @file test_fields.cpp
/// @brief Analytic fields: expression-backed, softmin distance, trig noise.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kgflow/expr.hpp"
#include "kgflow/fields.hpp"

using namespace kgflow;

namespace {

/// Central-difference gradient/Hessian of f.value, for cross-checking the
/// analytic members.
void check_derivatives(const AnalyticField& f, const Vec& x, int dim, double tol) {
  const double h = 1e-5;
  for (int i = 0; i < dim; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (f.value(xp) - f.value(xm)) / (2.0 * h);
    CHECK(f.grad(x)[i] == doctest::Approx(fd).epsilon(tol));
    for (int j = 0; j < dim; ++j) {
      const double gd = (f.grad(xp)[j] - f.grad(xm)[j]) / (2.0 * h);
      CHECK(f.hess(x)(i, j) == doctest::Approx(gd).epsilon(tol));
    }
  }
}

}  // namespace

TEST_CASE("expression-backed field carries exact derivatives") {
  const AnalyticField f = field_from_expr(Expr::parse("sin(2*x1)*exp(x2) + x1^2"), 2);
  const Vec x{0.3, -0.4};
  CHECK(f.value(x) ==
        doctest::Approx(std::sin(0.6) * std::exp(-0.4) + 0.09).epsilon(1e-15));
  check_derivatives(f, x, 2, 1e-7);
}

TEST_CASE("softmin distance: interior behavior") {
  const AnalyticField d = softmin_distance(Vec{0.0, 0.0}, Vec{1.0, 1.0}, 2, 2.0);
  // never exceeds the true distance; offset below it is at most log(4)/beta
  const Vec x{0.31, 0.5};
  CHECK(d.value(x) < 0.31);
  CHECK(d.value(x) > 0.31 - std::log(4.0) / 2.0 - 1e-12);
  check_derivatives(d, x, 2, 1e-6);
  check_derivatives(d, Vec{0.5, 0.5}, 2, 1e-6);  // symmetric tie point
  // gradient points away from the nearest face
  CHECK(d.grad(Vec{0.2, 0.5})[0] > 0.0);
  CHECK(d.grad(Vec{0.8, 0.5})[0] < 0.0);
}

TEST_CASE("softmin distance in one dimension") {
  const AnalyticField d = softmin_distance(Vec{-1.0, 0.0}, Vec{1.0, 0.0}, 1, 2.0);
  check_derivatives(d, Vec{-0.6, 0.0}, 1, 1e-6);
  check_derivatives(d, Vec{0.0, 0.0}, 1, 1e-6);
  CHECK(d.value(Vec{0.9, 0.0}) == doctest::Approx(d.value(Vec{-0.9, 0.0})).epsilon(1e-14));
}

TEST_CASE("softmin sharpens toward the true distance as beta grows") {
  const Vec x{0.3, 0.45};
  const double exact = 0.3;
  const double d2 = softmin_distance(Vec{0.0, 0.0}, Vec{1.0, 1.0}, 2, 2.0).value(x);
  const double d8 = softmin_distance(Vec{0.0, 0.0}, Vec{1.0, 1.0}, 2, 8.0).value(x);
  CHECK(std::abs(d8 - exact) < std::abs(d2 - exact));
}

TEST_CASE("trig profile evaluates its terms literally") {
  const AnalyticField f = trig_profile({TrigTerm{0.5, 2.0, 0.0, 0.3, 0.0}}, 1);
  const double x = 0.7;
  CHECK(f.value(Vec{x, 0.0}) == doctest::Approx(0.5 * std::sin(2.0 * x + 0.3)));
  CHECK(f.grad(Vec{x, 0.0})[0] == doctest::Approx(1.0 * std::cos(2.0 * x + 0.3)));

  const AnalyticField f2 = trig_profile({TrigTerm{0.25, 1.5, 2.0, 0.1, -0.2}}, 2);
  const Vec p{0.4, 0.6};
  CHECK(f2.value(p) ==
        doctest::Approx(0.25 * std::sin(1.5 * 0.4 + 0.1) * std::sin(2.0 * 0.6 - 0.2)));
  check_derivatives(f2, p, 2, 1e-7);
}

TEST_CASE("random trig profiles: deterministic per seed, bounded amplitude") {
  const AnalyticField a = random_trig_profile(2, 42);
  const AnalyticField b = random_trig_profile(2, 42);
  const AnalyticField c = random_trig_profile(2, 43);
  const Vec x{0.21, 0.77};
  CHECK(a.value(x) == b.value(x));
  CHECK(a.value(x) != c.value(x));
  // 3 terms, each |amp| <= 0.4
  CHECK(std::abs(a.value(x)) <= 1.2);
  check_derivatives(a, x, 2, 1e-6);
  check_derivatives(random_trig_profile(1, 7), Vec{0.3, 0.0}, 1, 1e-6);
}
