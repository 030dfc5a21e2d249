/// @file shape.cpp

#include "kgflow/shape.hpp"

#include <cmath>

#include "kgflow/errors.hpp"

namespace kgflow {

namespace {

/// u_{i;j} = plain Hessian - Gamma^k_ij u_k.
Sym covariant_hessian(const Sym& plain, const Christoffel& ch, const Vec& d1, int dim) {
  Sym out = plain;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      double corr = 0.0;
      for (int k = 0; k < dim; ++k) corr += ch.comp[k](i, j) * d1[k];
      out.add(i, j, -corr);
    }
  }
  return out;
}

}  // namespace

GeometrySamples sample_geometry(const AmbientGeometry& g, const Grid& grid) {
  GeometrySamples gs;
  gs.dim = grid.dim;
  gs.pts.reserve(grid.count());
  bool diag = true;
  bool ident = true;
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      AmbientPoint p = ambient_eval(g, grid.coord(i, j));
      diag = diag && p.sigma.xy == 0.0;
      ident = ident && p.sigma.xx == 1.0 && p.sigma.xy == 0.0 &&
              (grid.dim == 1 || p.sigma.yy == 1.0);
      gs.pts.push_back(p);
    }
  }
  gs.sigma_diagonal = diag;
  gs.sigma_identity = ident || g.sigma_is_identity;
  return gs;
}

double graph_W(const AmbientPoint& p, const Vec& du, int dim) {
  double n2 = contract_up(p.sigma_inv, du, du, dim);
  if (n2 < 0.0) n2 = 0.0;  // roundoff guard; sigma is SPD
  return std::sqrt(p.gamma + n2);
}

Sym induced_metric(const AmbientPoint& p, const Vec& du, int dim) {
  Sym g = p.sigma;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) g.add(i, j, du[i] * du[j] / p.gamma);
  }
  return g;
}

Sym induced_metric_inverse(const AmbientPoint& p, const Vec& du, double W, int dim) {
  const Vec up = raise_index(p.sigma_inv, du, dim);
  Sym gi = p.sigma_inv;
  const double w2 = W * W;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) gi.add(i, j, -up[i] * up[j] / w2);
  }
  return gi;
}

Sym second_fundamental_form(const AmbientPoint& p, const Vec& du, const Sym& d2u_cov,
                            double W, int dim, SffVariant variant) {
  Sym a;
  if (variant == SffVariant::gamma_gradient) {
    const double pgu = contract_up(p.sigma_inv, p.grad_gamma, du, dim);  // <grad gamma, grad u>
    const double g2 = 2.0 * p.gamma;
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j) {
        double v = d2u_cov(i, j) / W;
        v -= (du[i] * p.grad_gamma[j] + du[j] * p.grad_gamma[i]) / (g2 * W);
        v -= du[i] * du[j] * pgu / (g2 * p.gamma * W);
        a.add(i, j, v);
      }
    }
    return a;
  }
  // Orbit-acceleration grouping: Z_i = gamma_i / (2 gamma^2).
  const Vec z = orbit_acceleration(p, dim);
  const double zu = contract_up(p.sigma_inv, z, du, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      double v = d2u_cov(i, j) / W;
      v -= p.gamma * (du[i] * z[j] + du[j] * z[i]) / W;
      v -= du[i] * du[j] * zu / W;
      a.add(i, j, v);
    }
  }
  return a;
}

double mean_curvature(const AmbientPoint& p, const Vec& du, const Sym& d2u_cov, int dim,
                      CurvatureForm form) {
  const double W = graph_W(p, du, dim);
  if (form == CurvatureForm::trace) {
    const Sym a = second_fundamental_form(p, du, d2u_cov, W, dim, SffVariant::gamma_gradient);
    const Sym gi = induced_metric_inverse(p, du, W, dim);
    return double_contract(gi, a, dim);
  }
  // Divergence-expanded form.
  const Vec up = raise_index(p.sigma_inv, du, dim);
  const double pgu = contract_up(p.sigma_inv, p.grad_gamma, du, dim);
  const double w3 = W * W * W;
  double tr_sigma = 0.0;  // sigma^ij u_{i;j}
  double tr_up = 0.0;     // u^i u^j u_{i;j}
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      tr_sigma += p.sigma_inv(i, j) * d2u_cov(i, j);
      tr_up += up[i] * up[j] * d2u_cov(i, j);
    }
  }
  return tr_sigma / W - tr_up / w3 - pgu / (2.0 * w3) - pgu / (2.0 * p.gamma * W);
}

ShapeData shape_data(const AmbientPoint& p, const Vec& du, const Sym& d2u_cov, int dim) {
  ShapeData sd;
  sd.W = graph_W(p, du, dim);
  sd.g = induced_metric(p, du, dim);
  sd.g_inv = induced_metric_inverse(p, du, sd.W, dim);
  sd.det_g = det(sd.g, dim);
  sd.sff = second_fundamental_form(p, du, d2u_cov, sd.W, dim, SffVariant::gamma_gradient);
  sd.nH = double_contract(sd.g_inv, sd.sff, dim);
  sd.N_vertical = p.gamma / sd.W;
  const Vec up = raise_index(p.sigma_inv, du, dim);
  for (int i = 0; i < dim; ++i) sd.N_horizontal[i] = -up[i] / sd.W;
  return sd;
}

double sff_norm2(const ShapeData& sd, int dim) {
  // B^i_k = g^ij a_jk; |a|^2 = B^i_k B^k_i.
  double b[kMaxDim][kMaxDim] = {};
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) {
      double v = 0.0;
      for (int j = 0; j < dim; ++j) v += sd.g_inv(i, j) * sd.sff(j, k);
      b[i][k] = v;
    }
  }
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) s += b[i][k] * b[k][i];
  }
  return s;
}

double contact_angle(const AmbientPoint& p, const Vec& du, double W, int edge, int dim) {
  const EdgeInfo e = edge_info(edge);
  const Vec up = raise_index(p.sigma_inv, du, dim);
  const double saa = p.sigma_inv(e.axis, e.axis);
  return -e.inward_sign * up[e.axis] / (W * std::sqrt(saa));
}

GraphState state_from_analytic(const AnalyticField& f, const GeometrySamples& gs,
                               const Grid& grid, double t) {
  GraphState st;
  st.t = t;
  const int n = grid.count();
  st.u.resize(n);
  st.du.resize(n);
  st.d2u.resize(n);
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      const int id = grid.id(i, j);
      const Vec x = grid.coord(i, j);
      st.u[id] = f.value(x);
      st.du[id] = f.grad(x);
      st.d2u[id] =
          covariant_hessian(f.hess(x), gs.pts[id].christoffel, st.du[id], grid.dim);
    }
  }
  return st;
}

GraphState state_from_values(const std::vector<double>& u, const GeometrySamples& gs,
                             const Grid& grid, double t) {
  const int n1 = grid.n1, n2 = grid.n2, n = grid.count();
  GraphState st;
  st.t = t;
  st.u = u;
  st.du.resize(n);
  st.d2u.resize(n);
  std::vector<double> line(std::max(n1, n2));
  std::vector<double> p1(n, 0.0), p2(n, 0.0), d11(n, 0.0), d22(n, 0.0), d12(n, 0.0);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) line[i] = u[grid.id(i, j)];
    for (int i = 0; i < n1; ++i) {
      p1[grid.id(i, j)] = line_d1(line.data(), n1, i, grid.h[0]);
      d11[grid.id(i, j)] = line_d2(line.data(), n1, i, grid.h[0]);
    }
  }
  if (grid.dim == 2) {
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) line[j] = u[grid.id(i, j)];
      for (int j = 0; j < n2; ++j) {
        p2[grid.id(i, j)] = line_d1(line.data(), n2, j, grid.h[1]);
        d22[grid.id(i, j)] = line_d2(line.data(), n2, j, grid.h[1]);
      }
    }
    // Cross term: d2 of p1 and d1 of p2, symmetrized.
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) line[j] = p1[grid.id(i, j)];
      for (int j = 0; j < n2; ++j)
        d12[grid.id(i, j)] = 0.5 * line_d1(line.data(), n2, j, grid.h[1]);
    }
    for (int j = 0; j < n2; ++j) {
      for (int i = 0; i < n1; ++i) line[i] = p2[grid.id(i, j)];
      for (int i = 0; i < n1; ++i)
        d12[grid.id(i, j)] += 0.5 * line_d1(line.data(), n1, i, grid.h[0]);
    }
  }
  for (int id = 0; id < n; ++id) {
    st.du[id] = Vec{p1[id], p2[id]};
    Sym plain;
    plain.xx = d11[id];
    plain.xy = d12[id];
    plain.yy = d22[id];
    st.d2u[id] = covariant_hessian(plain, gs.pts[id].christoffel, st.du[id], grid.dim);
  }
  return st;
}

GraphState state_from_extended(const ExtendedField& ext, const GeometrySamples& gs,
                               const Grid& grid, double t) {
  GraphState st;
  st.t = t;
  const int n = grid.count();
  st.u.resize(n);
  st.du.resize(n);
  st.d2u.resize(n);
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      const int id = grid.id(i, j);
      st.u[id] = ext.at(i, j);
      const PartialDerivs d = ext.derivatives_at(i, j);
      st.du[id] = d.d1;
      st.d2u[id] = covariant_hessian(d.d2, gs.pts[id].christoffel, d.d1, grid.dim);
    }
  }
  return st;
}

double tilt_theta(const AmbientPoint& p, const Vec& du, const Vec& dd, double W, int dim) {
  return -contract_up(p.sigma_inv, dd, du, dim) / W;
}

double tilt_identity_residual(const Grid& grid, const GeometrySamples& gs,
                              const GraphState& st, const AnalyticField& dist) {
  const int dim = grid.dim;
  // Sampled theta at every node.
  std::vector<double> theta(grid.count());
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      const int id = grid.id(i, j);
      const AmbientPoint& p = gs.pts[id];
      const double W = graph_W(p, st.du[id], dim);
      theta[id] = tilt_theta(p, st.du[id], dist.grad(grid.coord(i, j)), W, dim);
    }
  }
  double worst = 0.0;
  for (int j = 0; j < grid.n2; ++j) {
    for (int i = 0; i < grid.n1; ++i) {
      if (grid.on_boundary(i, j)) continue;
      const int id = grid.id(i, j);
      const AmbientPoint& p = gs.pts[id];
      const Vec x = grid.coord(i, j);
      const Vec du = st.du[id];
      const double W = graph_W(p, du, dim);
      const Sym a =
          second_fundamental_form(p, du, st.d2u[id], W, dim, SffVariant::gamma_gradient);
      const Sym gi = induced_metric_inverse(p, du, W, dim);
      const Vec dd = dist.grad(x);
      const Sym ddh = covariant_hessian(dist.hess(x), p.christoffel, dd, dim);
      const Vec up = raise_index(p.sigma_inv, du, dim);
      const double kappa =
          -contract_up(p.sigma_inv, p.grad_gamma, dd, dim) / (2.0 * p.gamma);
      const Vec dg = raise_index(gi, dd, dim);  // g-raised gradient of d
      for (int c = 0; c < dim; ++c) {
        double rhs = 0.0;
        for (int k = 0; k < dim; ++k) {
          rhs -= a(c, k) * dg[k];
          rhs += (ddh(c, k) - kappa * p.sigma(c, k)) * (-up[k] / W);
        }
        // Centered difference of the sampled theta (interior node).
        const int ip = c == 0 ? i + 1 : i, im = c == 0 ? i - 1 : i;
        const int jp = c == 1 ? j + 1 : j, jm = c == 1 ? j - 1 : j;
        const double fd =
            (theta[grid.id(ip, jp)] - theta[grid.id(im, jm)]) / (2.0 * grid.h[c]);
        worst = std::max(worst, std::abs(fd - rhs));
      }
    }
  }
  return worst;
}

}  // namespace kgflow
