/// @file fields.cpp

#include "kgflow/fields.hpp"

#include <cmath>
#include <random>

namespace kgflow {

AnalyticField field_from_expr(const Expr& e, int dim) {
  const Expr d1 = e.derivative(0);
  const Expr d2 = dim == 2 ? e.derivative(1) : Expr::constant(0.0);
  const Expr d11 = d1.derivative(0);
  const Expr d12 = dim == 2 ? d1.derivative(1) : Expr::constant(0.0);
  const Expr d22 = dim == 2 ? d2.derivative(1) : Expr::constant(0.0);
  AnalyticField f;
  f.value = [e](const Vec& x) { return e(x); };
  f.grad = [d1, d2](const Vec& x) { return Vec{d1(x), d2(x)}; };
  f.hess = [d11, d12, d22](const Vec& x) {
    Sym s;
    s.xx = d11(x);
    s.xy = d12(x);
    s.yy = d22(x);
    return s;
  };
  return f;
}

AnalyticField softmin_distance(Vec lo, Vec hi, int dim, double beta) {
  const int nfaces = 2 * dim;
  AnalyticField f;
  // Face distances l_m and their constant gradients c_m.
  auto faces = [lo, hi, dim](const Vec& x, double* l, Vec* c) {
    for (int a = 0; a < dim; ++a) {
      l[2 * a] = x[a] - lo[a];
      c[2 * a] = Vec{0.0, 0.0};
      c[2 * a][a] = 1.0;
      l[2 * a + 1] = hi[a] - x[a];
      c[2 * a + 1] = Vec{0.0, 0.0};
      c[2 * a + 1][a] = -1.0;
    }
  };
  auto weights = [faces, beta, nfaces](const Vec& x, double* w, Vec* c) {
    double l[4];
    faces(x, l, c);
    double lmin = l[0];
    for (int m = 1; m < nfaces; ++m) lmin = std::min(lmin, l[m]);
    double s = 0.0;
    for (int m = 0; m < nfaces; ++m) {
      w[m] = std::exp(-beta * (l[m] - lmin));  // shift for stability
      s += w[m];
    }
    for (int m = 0; m < nfaces; ++m) w[m] /= s;
    return std::make_pair(lmin, s);
  };
  f.value = [weights, beta, nfaces](const Vec& x) {
    double w[4];
    Vec c[4];
    auto [lmin, s] = weights(x, w, c);
    return lmin - std::log(s) / beta;
  };
  f.grad = [weights, dim, nfaces](const Vec& x) {
    double w[4];
    Vec c[4];
    weights(x, w, c);
    Vec g{0.0, 0.0};
    for (int m = 0; m < nfaces; ++m)
      for (int a = 0; a < dim; ++a) g[a] += w[m] * c[m][a];
    return g;
  };
  f.hess = [weights, beta, dim, nfaces](const Vec& x) {
    double w[4];
    Vec c[4];
    weights(x, w, c);
    Vec g{0.0, 0.0};
    for (int m = 0; m < nfaces; ++m)
      for (int a = 0; a < dim; ++a) g[a] += w[m] * c[m][a];
    // Hess = -beta (sum_m w_m c_m c_m^T - g g^T)
    Sym hs;
    for (int a = 0; a < dim; ++a) {
      for (int b = a; b < dim; ++b) {
        double v = 0.0;
        for (int m = 0; m < nfaces; ++m) v += w[m] * c[m][a] * c[m][b];
        hs.add(a, b, -beta * (v - g[a] * g[b]));
      }
    }
    return hs;
  };
  return f;
}

AnalyticField trig_profile(std::vector<TrigTerm> terms, int dim) {
  AnalyticField f;
  f.value = [terms, dim](const Vec& x) {
    double v = 0.0;
    for (const TrigTerm& t : terms) {
      double tv = t.amp * std::sin(t.k1 * x[0] + t.p1);
      if (dim == 2) tv *= std::sin(t.k2 * x[1] + t.p2);
      v += tv;
    }
    return v;
  };
  f.grad = [terms, dim](const Vec& x) {
    Vec g{0.0, 0.0};
    for (const TrigTerm& t : terms) {
      const double s1 = std::sin(t.k1 * x[0] + t.p1), c1 = std::cos(t.k1 * x[0] + t.p1);
      const double s2 = dim == 2 ? std::sin(t.k2 * x[1] + t.p2) : 1.0;
      const double c2 = dim == 2 ? std::cos(t.k2 * x[1] + t.p2) : 0.0;
      g[0] += t.amp * t.k1 * c1 * s2;
      if (dim == 2) g[1] += t.amp * t.k2 * s1 * c2;
    }
    return g;
  };
  f.hess = [terms, dim](const Vec& x) {
    Sym hs;
    for (const TrigTerm& t : terms) {
      const double s1 = std::sin(t.k1 * x[0] + t.p1), c1 = std::cos(t.k1 * x[0] + t.p1);
      const double s2 = dim == 2 ? std::sin(t.k2 * x[1] + t.p2) : 1.0;
      const double c2 = dim == 2 ? std::cos(t.k2 * x[1] + t.p2) : 0.0;
      hs.xx += -t.amp * t.k1 * t.k1 * s1 * s2;
      if (dim == 2) {
        hs.xy += t.amp * t.k1 * t.k2 * c1 * c2;
        hs.yy += -t.amp * t.k2 * t.k2 * s1 * s2;
      }
    }
    return hs;
  };
  return f;
}

AnalyticField random_trig_profile(int dim, std::uint64_t seed, int nterms, double amp,
                                  double kmax) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uamp(-amp, amp);
  std::uniform_real_distribution<double> uk(0.5, kmax);
  std::uniform_real_distribution<double> uph(0.0, 6.283185307179586);
  std::vector<TrigTerm> terms;
  terms.reserve(nterms);
  for (int t = 0; t < nterms; ++t) {
    TrigTerm tt;
    tt.amp = uamp(rng);
    tt.k1 = uk(rng);
    tt.k2 = uk(rng);
    tt.p1 = uph(rng);
    tt.p2 = uph(rng);
    terms.push_back(tt);
  }
  return trig_profile(std::move(terms), dim);
}

}  // namespace kgflow
