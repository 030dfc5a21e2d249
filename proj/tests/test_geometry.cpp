/// @file test_geometry.cpp
/// @brief Ambient charts: exact values, FD consistency oracles, error paths.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kgflow/errors.hpp"
#include "kgflow/expr.hpp"
#include "kgflow/geometry.hpp"

using namespace kgflow;

TEST_CASE("flat product chart") {
  const AmbientGeometry g = euclidean_product(2);
  const AmbientPoint p = ambient_eval(g, Vec{0.3, -0.4});
  CHECK(p.gamma == 1.0);
  CHECK(p.grad_gamma[0] == 0.0);
  CHECK(p.sigma(0, 0) == 1.0);
  CHECK(p.sigma(0, 1) == 0.0);
  CHECK(p.sqrt_det_sigma == 1.0);
  CHECK(g.sigma_is_identity);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(p.christoffel.comp[k](i, j) == 0.0);
}

TEST_CASE("helicoidal chart: gamma = 1/r^2 and its gradient") {
  const AmbientGeometry g = helicoidal(0.5);
  const double r = 1.25;
  const AmbientPoint p = ambient_eval(g, Vec{r, 0.2});
  CHECK(p.gamma == doctest::Approx(1.0 / (r * r)).epsilon(1e-15));
  CHECK(p.grad_gamma[0] == doctest::Approx(-2.0 / (r * r * r)).epsilon(1e-14));
  CHECK(p.grad_gamma[1] == 0.0);
  CHECK(grad_gamma_consistency(g, Vec{r, 0.2}, 1e-5) < 1e-8);
  CHECK_THROWS_AS(ambient_eval(g, Vec{0.4, 0.0}), DomainError);  // left of the chart
}

TEST_CASE("exponential warp: gamma = exp(2 lambda x)") {
  const double lambda = 0.7;
  const AmbientGeometry g = exponential_warp(lambda);
  const double x = 0.6;
  const AmbientPoint p = ambient_eval(g, Vec{x, 0.0});
  CHECK(p.gamma == doctest::Approx(std::exp(2.0 * lambda * x)).epsilon(1e-15));
  CHECK(p.grad_gamma[0] == doctest::Approx(2.0 * lambda * p.gamma).epsilon(1e-14));
  CHECK(grad_gamma_consistency(g, Vec{x, 0.0}, 1e-5) < 1e-7);
}

TEST_CASE("custom curved chart: symbolic Christoffels match metric differences") {
  const AmbientGeometry g = custom_geometry(
      2, Expr::parse("1 + 0.2*sin(x1 + x2)"), Expr::parse("0.1*x1*x2"),
      Expr::parse("1 + 0.1*x1^2"), Expr::parse("exp(0.3*x1 - 0.2*x2)"), "wavy");
  for (double a : {-0.4, 0.1, 0.7}) {
    for (double b : {-0.3, 0.5}) {
      CAPTURE(a);
      CAPTURE(b);
      CHECK(christoffel_consistency(g, Vec{a, b}, 1e-5) < 1e-8);
      CHECK(grad_gamma_consistency(g, Vec{a, b}, 1e-5) < 1e-8);
    }
  }
}

TEST_CASE("custom chart in one variable") {
  const AmbientGeometry g =
      custom_geometry(1, Expr::parse("1 + 0.3*x^2"), Expr::constant(0.0),
                      Expr::constant(1.0), Expr::parse("1 + x^2"), "curved_line");
  CHECK(christoffel_consistency(g, Vec{0.4, 0.0}, 1e-5) < 1e-9);
  const AmbientPoint p = ambient_eval(g, Vec{0.4, 0.0});
  // Gamma^1_11 = sigma'/(2 sigma)
  const double s = 1.0 + 0.3 * 0.16, ds = 0.6 * 0.4;
  CHECK(p.christoffel.comp[0](0, 0) == doctest::Approx(ds / (2.0 * s)).epsilon(1e-13));
  CHECK(p.sqrt_det_sigma == doctest::Approx(std::sqrt(s)).epsilon(1e-15));
}

TEST_CASE("degenerate data is rejected, not propagated") {
  const AmbientGeometry bad_gamma =
      custom_geometry(1, Expr::constant(1.0), Expr::constant(0.0), Expr::constant(1.0),
                      Expr::parse("x"), "gamma_crosses_zero");
  CHECK_THROWS_AS(ambient_eval(bad_gamma, Vec{-0.5, 0.0}), GeometryError);

  const AmbientGeometry bad_sigma = custom_geometry(
      2, Expr::constant(1.0), Expr::constant(2.0), Expr::constant(1.0),
      Expr::constant(1.0), "indefinite_leaf_metric");  // det = 1 - 4 < 0
  CHECK_THROWS_AS(ambient_eval(bad_sigma, Vec{0.0, 0.0}), GeometryError);
}

TEST_CASE("orbit acceleration and drift covector scalings") {
  const AmbientGeometry g = exponential_warp(0.5);
  const AmbientPoint p = ambient_eval(g, Vec{0.3, 0.0});
  const Vec z = orbit_acceleration(p, 1);
  const Vec d = drift_covector(p, 1);
  CHECK(z[0] == doctest::Approx(p.grad_gamma[0] / (2.0 * p.gamma * p.gamma)).epsilon(1e-15));
  CHECK(d[0] == doctest::Approx(p.grad_gamma[0] / (2.0 * p.gamma)).epsilon(1e-15));
}
