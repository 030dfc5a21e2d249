#pragma once

/// @file geometry.hpp
/// @brief Ambient warped-product geometry restricted to one rectangular chart.
///
/// The ambient space is a warped product of an n-dimensional leaf (P, sigma)
/// with a line of Killing orbits; gamma = 1/|Y|^2 where Y is the Killing
/// field.  A geometry supplies sigma, its Christoffel symbols, gamma and
/// grad gamma analytically; consistency operations cross-check the analytic
/// data against finite differences.

#include <functional>
#include <string>

#include "kgflow/expr.hpp"
#include "kgflow/tensor.hpp"

namespace kgflow {

/// Full pointwise geometry package.
struct AmbientPoint {
  Sym sigma;
  Sym sigma_inv;
  Christoffel christoffel;
  double gamma = 1.0;
  Vec grad_gamma{0.0, 0.0};
  double sqrt_det_sigma = 1.0;
};

struct AmbientGeometry {
  int dim = 1;
  std::string name;

  std::function<Sym(const Vec&)> sigma;
  std::function<Christoffel(const Vec&)> christoffel;
  std::function<double(const Vec&)> gamma;
  std::function<Vec(const Vec&)> grad_gamma;
  std::function<bool(const Vec&)> in_chart;  // chart validity predicate

  /// True for the built-in geometries, whose leaf metric is the identity.
  bool sigma_is_identity = false;
};

/// sigma = identity, gamma = 1: the orbits are orthogonal unit Killing
/// fields and the graph equation reduces to unwarped mean curvature flow.
AmbientGeometry euclidean_product(int dim);

/// Cylindrical-coordinate leaf (r, z) with Y the rotational field:
/// sigma = identity, gamma = 1/r^2.  The chart requires r >= r_min > 0.
AmbientGeometry helicoidal(double r_min = 0.5);

/// One-dimensional leaf with gamma = exp(2 lambda x); exercises every
/// gamma-coupling term of the flow without curving sigma.
AmbientGeometry exponential_warp(double lambda);

/// User geometry from expressions.  Gradients and Christoffel symbols are
/// obtained by symbolic differentiation of the parsed trees, so the
/// analytic contract holds for arbitrary config input.
AmbientGeometry custom_geometry(int dim, const Expr& sigma11, const Expr& sigma12,
                                const Expr& sigma22, const Expr& gamma,
                                const std::string& name = "custom");

/// Evaluate the full package at a point.  Throws DomainError outside the
/// chart and GeometryError when sigma is not SPD or gamma <= 0.
AmbientPoint ambient_eval(const AmbientGeometry& g, const Vec& x);

/// Max abs difference between the geometry's Christoffel symbols and the
/// ones assembled from central finite differences of sigma at step h.
double christoffel_consistency(const AmbientGeometry& g, const Vec& x, double h);

/// Max abs difference between grad_gamma and central differences of gamma.
double grad_gamma_consistency(const AmbientGeometry& g, const Vec& x, double h);

/// Orbit acceleration as a covector: (grad gamma) / (2 gamma^2).
Vec orbit_acceleration(const AmbientPoint& p, int dim);

/// gamma-weighted orbit acceleration (grad gamma) / (2 gamma): the drift
/// covector of the graph flow.
Vec drift_covector(const AmbientPoint& p, int dim);

}  // namespace kgflow
