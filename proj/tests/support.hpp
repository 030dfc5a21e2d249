/// @file support.hpp
/// @brief Scenario builders and small helpers shared across the test suite.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "kgflow/fields.hpp"
#include "kgflow/flow.hpp"
#include "kgflow/stationary.hpp"

namespace kgtest {

using namespace kgflow;

constexpr double kSin1 = 0.8414709848078965;

/// Flat strip [-1,1] with the symmetric boundary angle sin(1): the setup
/// whose translating profile is log(sec x) at unit speed.
inline FlowProblem translator_problem(int n) {
  AmbientGeometry geom = euclidean_product(1);
  Grid grid = make_grid(1, Vec{-1.0, 0.0}, Vec{1.0, 0.0}, n, 1);
  return make_flow_problem(geom, grid, [](const Vec&) { return 0.0; },
                           boundary_constant(grid, kSin1));
}

/// u(x) = log(sec x): the exact translator profile on the strip.
inline AnalyticField translator_profile() {
  AnalyticField f;
  f.value = [](const Vec& x) { return -std::log(std::cos(x[0])); };
  f.grad = [](const Vec& x) { return Vec{std::tan(x[0]), 0.0}; };
  f.hess = [](const Vec& x) {
    Sym s;
    const double c = std::cos(x[0]);
    s.xx = 1.0 / (c * c);
    return s;
  };
  return f;
}

/// Helicoidal chart [0.5,1.5] x [-0.5,0.5] with the angles traced by the
/// exact stationary graph u = z.
inline FlowProblem helicoid_problem(int n1, int n2) {
  AmbientGeometry geom = helicoidal(0.5);
  Grid grid = make_grid(2, Vec{0.5, -0.5}, Vec{1.5, 0.5}, n1, n2);
  BoundaryField phi = boundary_from_function(grid, [](const Vec& x, int edge) {
    if (edge < 2) return 0.0;
    const double w = x[0] / std::sqrt(1.0 + x[0] * x[0]);
    return edge == 2 ? -w : w;
  });
  return make_flow_problem(geom, grid, [](const Vec&) { return 0.0; },
                           std::move(phi));
}

/// u(r, z) = z.
inline AnalyticField helicoid_profile() {
  AnalyticField f;
  f.value = [](const Vec& x) { return x[1]; };
  f.grad = [](const Vec&) { return Vec{0.0, 1.0}; };
  f.hess = [](const Vec&) { return Sym{}; };
  return f;
}

inline std::vector<double> sample_values(const AnalyticField& f, const Grid& g) {
  std::vector<double> u(static_cast<std::size_t>(g.count()));
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i)
      u[static_cast<std::size_t>(g.id(i, j))] = f.value(g.coord(i, j));
  return u;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

/// phi matching the analytic contact angle of f: data that is exactly
/// compatible, so the flow starts smooth.
inline BoundaryField matched_angles(const AnalyticField& f, const AmbientGeometry& geom,
                                    const Grid& grid) {
  return boundary_from_function(grid, [&](const Vec& x, int edge) {
    const AmbientPoint p = ambient_eval(geom, x);
    const Vec du = f.grad(x);
    return contact_angle(p, du, graph_W(p, du, grid.dim), edge, grid.dim);
  });
}

}  // namespace kgtest
