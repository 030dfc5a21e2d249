#pragma once

/// @file tensor.hpp
/// @brief Fixed-size vector/tensor helpers for leaf dimensions 1 and 2.
///
/// The solver never needs more than a 2x2 symmetric tensor per node, so
/// everything here is a POD with inline arithmetic; no linear-algebra
/// library is involved at the per-node level.

#include <array>
#include <cmath>

namespace kgflow {

inline constexpr int kMaxDim = 2;

using Vec = std::array<double, kMaxDim>;

/// Symmetric 2x2 tensor stored as {xx, xy, yy}; 1D uses the xx slot only.
struct Sym {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double operator()(int i, int j) const {
    if (i == 0 && j == 0) return xx;
    if (i == 1 && j == 1) return yy;
    return xy;
  }

  void add(int i, int j, double v) {
    if (i == 0 && j == 0) {
      xx += v;
    } else if (i == 1 && j == 1) {
      yy += v;
    } else {
      xy += v;
    }
  }

  static Sym identity() { return {1.0, 0.0, 1.0}; }
};

inline double det(const Sym& s, int dim) {
  return dim == 1 ? s.xx : s.xx * s.yy - s.xy * s.xy;
}

/// Inverse of an SPD symmetric tensor; the unused 2D slots of a 1D tensor
/// stay at identity so det() of the result remains benign.
inline Sym inverse(const Sym& s, int dim) {
  if (dim == 1) return {1.0 / s.xx, 0.0, 1.0};
  const double d = det(s, 2);
  return {s.yy / d, -s.xy / d, s.xx / d};
}

/// sigma^{ij} a_i b_j for covectors a, b (contraction against an inverse metric).
inline double contract_up(const Sym& inv, const Vec& a, const Vec& b, int dim) {
  double r = inv.xx * a[0] * b[0];
  if (dim == 2) r += inv.xy * (a[0] * b[1] + a[1] * b[0]) + inv.yy * a[1] * b[1];
  return r;
}

/// Raise a covector index: (sigma^{ij} a_j).
inline Vec raise_index(const Sym& inv, const Vec& a, int dim) {
  Vec r{0.0, 0.0};
  r[0] = inv.xx * a[0] + (dim == 2 ? inv.xy * a[1] : 0.0);
  if (dim == 2) r[1] = inv.xy * a[0] + inv.yy * a[1];
  return r;
}

/// Full double contraction A^{ij} B_{ij} of two symmetric tensors.
inline double double_contract(const Sym& a, const Sym& b, int dim) {
  double r = a.xx * b.xx;
  if (dim == 2) r += 2.0 * a.xy * b.xy + a.yy * b.yy;
  return r;
}

inline double max_abs(const Sym& s, int dim) {
  double m = std::fabs(s.xx);
  if (dim == 2) {
    m = std::fmax(m, std::fabs(s.xy));
    m = std::fmax(m, std::fabs(s.yy));
  }
  return m;
}

/// Christoffel symbols Gamma^k_{ij}, one symmetric ij block per upper index.
struct Christoffel {
  Sym comp[kMaxDim];

  double max_abs(int dim) const {
    double m = kgflow::max_abs(comp[0], dim);
    if (dim == 2) m = std::fmax(m, kgflow::max_abs(comp[1], dim));
    return m;
  }
};

}  // namespace kgflow
