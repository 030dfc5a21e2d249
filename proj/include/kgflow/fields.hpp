#pragma once

/// @file fields.hpp
/// @brief Analytic scalar fields carrying value, gradient and Hessian.
///
/// Used wherever exact derivatives are wanted: initial data, manufactured
/// solutions, the smoothed boundary-distance field.

#include <cstdint>
#include <functional>
#include <vector>

#include "kgflow/expr.hpp"
#include "kgflow/tensor.hpp"

namespace kgflow {

struct AnalyticField {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Sym(const Vec&)> hess;
};

/// Field from a parsed expression; gradient and Hessian by symbolic
/// differentiation.
AnalyticField field_from_expr(const Expr& e, int dim);

/// Smooth proxy for the distance to the boundary of the box [lo,hi]:
///   d = -(1/beta) log sum_m exp(-beta l_m),
/// where l_m are the affine distances to the faces.  Smooth everywhere,
/// equals min_m l_m up to O(exp(-beta gap)); gradient has unit length away
/// from the medial set.
AnalyticField softmin_distance(Vec lo, Vec hi, int dim, double beta);

/// Separable trigonometric mode a * sin(k1 x1 + p1) [* sin(k2 x2 + p2)].
struct TrigTerm {
  double amp = 1.0;
  double k1 = 1.0;
  double k2 = 1.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

AnalyticField trig_profile(std::vector<TrigTerm> terms, int dim);

/// Deterministic pseudo-random superposition of nterms modes with
/// amplitudes in [-amp, amp] and wave numbers in [0.5, kmax].
AnalyticField random_trig_profile(int dim, std::uint64_t seed, int nterms = 3,
                                  double amp = 0.4, double kmax = 2.0);

}  // namespace kgflow
