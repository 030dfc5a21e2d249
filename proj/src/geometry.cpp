/// @file geometry.cpp
/// @brief Built-in geometries, symbolic custom geometries, consistency checks.

#include "kgflow/geometry.hpp"

#include <cmath>
#include <utility>

#include "kgflow/errors.hpp"

namespace kgflow {

namespace {

Sym identity_sym() { return Sym::identity(); }

Christoffel zero_christoffel() { return Christoffel{}; }

}  // namespace

AmbientGeometry euclidean_product(int dim) {
  if (dim < 1 || dim > kMaxDim) throw GeometryError("euclidean_product: dim must be 1 or 2");
  AmbientGeometry g;
  g.dim = dim;
  g.name = "euclidean_product";
  g.sigma = [](const Vec&) { return identity_sym(); };
  g.christoffel = [](const Vec&) { return zero_christoffel(); };
  g.gamma = [](const Vec&) { return 1.0; };
  g.grad_gamma = [](const Vec&) { return Vec{0.0, 0.0}; };
  g.in_chart = [](const Vec&) { return true; };
  g.sigma_is_identity = true;
  return g;
}

AmbientGeometry helicoidal(double r_min) {
  if (!(r_min > 0.0)) throw GeometryError("helicoidal: r_min must be positive");
  AmbientGeometry g;
  g.dim = 2;
  g.name = "helicoidal";
  g.sigma = [](const Vec&) { return identity_sym(); };
  g.christoffel = [](const Vec&) { return zero_christoffel(); };
  g.gamma = [](const Vec& x) { return 1.0 / (x[0] * x[0]); };
  g.grad_gamma = [](const Vec& x) {
    return Vec{-2.0 / (x[0] * x[0] * x[0]), 0.0};
  };
  g.in_chart = [r_min](const Vec& x) { return x[0] >= r_min; };
  g.sigma_is_identity = true;
  return g;
}

AmbientGeometry exponential_warp(double lambda) {
  AmbientGeometry g;
  g.dim = 1;
  g.name = "exponential_warp";
  g.sigma = [](const Vec&) { return identity_sym(); };
  g.christoffel = [](const Vec&) { return zero_christoffel(); };
  g.gamma = [lambda](const Vec& x) { return std::exp(2.0 * lambda * x[0]); };
  g.grad_gamma = [lambda](const Vec& x) {
    return Vec{2.0 * lambda * std::exp(2.0 * lambda * x[0]), 0.0};
  };
  g.in_chart = [](const Vec&) { return true; };
  g.sigma_is_identity = true;
  return g;
}

AmbientGeometry custom_geometry(int dim, const Expr& sigma11, const Expr& sigma12,
                                const Expr& sigma22, const Expr& gamma,
                                const std::string& name) {
  if (dim < 1 || dim > kMaxDim) throw GeometryError("custom_geometry: dim must be 1 or 2");

  // Symbolic first derivatives of every metric entry and of gamma.
  struct Entry {
    Expr f;
    Expr d1;
    Expr d2;
  };
  auto make_entry = [](const Expr& e) {
    return Entry{e, e.derivative(0), e.derivative(1)};
  };
  auto s11 = make_entry(sigma11);
  auto s12 = make_entry(sigma12);
  auto s22 = make_entry(sigma22);
  auto gam = make_entry(gamma);

  double c11 = 0.0, c12 = 0.0, c22 = 0.0;
  const bool sigma_const = sigma11.constant_value(&c11) && sigma12.constant_value(&c12) &&
                           sigma22.constant_value(&c22);
  const bool is_identity = sigma_const && c11 == 1.0 && c12 == 0.0 && c22 == 1.0;

  AmbientGeometry g;
  g.dim = dim;
  g.name = name;
  g.sigma_is_identity = is_identity;
  g.sigma = [s11, s12, s22, dim](const Vec& x) {
    Sym s;
    s.xx = s11.f(x);
    s.xy = dim == 2 ? s12.f(x) : 0.0;
    s.yy = dim == 2 ? s22.f(x) : 1.0;
    return s;
  };
  g.gamma = [gam](const Vec& x) { return gam.f(x); };
  g.grad_gamma = [gam, dim](const Vec& x) {
    Vec v{gam.d1(x), 0.0};
    if (dim == 2) v[1] = gam.d2(x);
    return v;
  };
  g.in_chart = [](const Vec&) { return true; };

  // Gamma^k_ij = sigma^kl (d_i sigma_lj + d_j sigma_li - d_l sigma_ij) / 2.
  g.christoffel = [s11, s12, s22, dim](const Vec& x) {
    Christoffel ch;
    if (dim == 1) {
      const double s = s11.f(x);
      if (!(s > 0.0)) throw GeometryError("custom_geometry: sigma11 must be positive");
      ch.comp[0].xx = 0.5 * s11.d1(x) / s;
      return ch;
    }
    Sym s;
    s.xx = s11.f(x);
    s.xy = s12.f(x);
    s.yy = s22.f(x);
    const Sym inv = inverse(s, 2);
    // d sigma_{ab} / d x^c, packed c -> Sym.
    const Sym d1{s11.d1(x), s12.d1(x), s22.d1(x)};
    const Sym d2{s11.d2(x), s12.d2(x), s22.d2(x)};
    const Sym* ds[2] = {&d1, &d2};
    for (int k = 0; k < 2; ++k) {
      for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) {
          double v = 0.0;
          for (int l = 0; l < 2; ++l) {
            v += inv(k, l) * ((*ds[i])(l, j) + (*ds[j])(l, i) - (*ds[l])(i, j));
          }
          if (i == 0 && j == 0) ch.comp[k].xx = 0.5 * v;
          if (i == 0 && j == 1) ch.comp[k].xy = 0.5 * v;
          if (i == 1 && j == 1) ch.comp[k].yy = 0.5 * v;
        }
      }
    }
    return ch;
  };
  return g;
}

AmbientPoint ambient_eval(const AmbientGeometry& g, const Vec& x) {
  if (!g.in_chart(x)) {
    throw DomainError("point outside the geometry chart");
  }
  AmbientPoint p;
  p.sigma = g.sigma(x);
  const double d = det(p.sigma, g.dim);
  if (!(p.sigma.xx > 0.0) || !(d > 0.0)) {
    throw GeometryError("leaf metric is not positive definite at a grid point");
  }
  p.sigma_inv = inverse(p.sigma, g.dim);
  p.sqrt_det_sigma = std::sqrt(d);
  p.christoffel = g.christoffel(x);
  p.gamma = g.gamma(x);
  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) {
    throw GeometryError("gamma must be positive and finite at every grid point");
  }
  p.grad_gamma = g.grad_gamma(x);
  return p;
}

double christoffel_consistency(const AmbientGeometry& g, const Vec& x, double h) {
  const int dim = g.dim;
  // Central differences of sigma entries.
  Sym dsig[kMaxDim];
  for (int c = 0; c < dim; ++c) {
    Vec xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const Sym sp = g.sigma(xp), sm = g.sigma(xm);
    dsig[c].xx = (sp.xx - sm.xx) / (2.0 * h);
    dsig[c].xy = (sp.xy - sm.xy) / (2.0 * h);
    dsig[c].yy = (sp.yy - sm.yy) / (2.0 * h);
  }
  const Sym inv = inverse(g.sigma(x), dim);
  Christoffel fd;
  for (int k = 0; k < dim; ++k) {
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j) {
        double v = 0.0;
        for (int l = 0; l < dim; ++l) {
          v += inv(k, l) * (dsig[i](l, j) + dsig[j](l, i) - dsig[l](i, j));
        }
        fd.comp[k].add(i, j, 0.5 * v);
      }
    }
  }
  const Christoffel an = g.christoffel(x);
  double err = 0.0;
  for (int k = 0; k < dim; ++k) {
    Sym diff;
    diff.xx = an.comp[k].xx - fd.comp[k].xx;
    diff.xy = an.comp[k].xy - fd.comp[k].xy;
    diff.yy = an.comp[k].yy - fd.comp[k].yy;
    err = std::max(err, max_abs(diff, dim));
  }
  return err;
}

double grad_gamma_consistency(const AmbientGeometry& g, const Vec& x, double h) {
  double err = 0.0;
  const Vec gg = g.grad_gamma(x);
  for (int c = 0; c < g.dim; ++c) {
    Vec xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const double fd = (g.gamma(xp) - g.gamma(xm)) / (2.0 * h);
    err = std::max(err, std::abs(fd - gg[c]));
  }
  return err;
}

Vec orbit_acceleration(const AmbientPoint& p, int dim) {
  Vec z{0.0, 0.0};
  const double denom = 2.0 * p.gamma * p.gamma;
  for (int i = 0; i < dim; ++i) z[i] = p.grad_gamma[i] / denom;
  return z;
}

Vec drift_covector(const AmbientPoint& p, int dim) {
  Vec z{0.0, 0.0};
  const double denom = 2.0 * p.gamma;
  for (int i = 0; i < dim; ++i) z[i] = p.grad_gamma[i] / denom;
  return z;
}

}  // namespace kgflow
