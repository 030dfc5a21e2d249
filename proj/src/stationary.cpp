/// @file stationary.cpp

#include "kgflow/stationary.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "kgflow/errors.hpp"

namespace kgflow {

namespace {

void remove_mean(std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

GraphState closed_state(const FlowProblem& fp, const BoundaryClosure& closure,
                        const std::vector<double>& u) {
  ExtendedField ext(fp.grid);
  ext.set_interior(u);
  closure.close(ext);
  return state_from_extended(ext, fp.samples, fp.grid);
}

/// sqrt(gamma)/W-weighted mean of the pointwise speed W(nH - H), with the
/// same quadrature the residual uses.  Removing this constant zeroes the
/// weighted integral of the residual identically, so the pseudo-time fixed
/// point is an exact discrete soliton; the boundary-flux speed agrees with
/// it only to quadrature accuracy and would leave an O(h^2) floor.
double weighted_mean_speed(const FlowProblem& fp, const GraphState& st) {
  const Grid& g = fp.grid;
  const std::vector<double> f0 = flow_rhs(fp, st);
  std::vector<double> num(f0.size()), den(f0.size());
  for (std::size_t id = 0; id < f0.size(); ++id) {
    const AmbientPoint& p = fp.samples.pts[id];
    const double w = std::sqrt(p.gamma) / graph_W(p, st.du[id], g.dim);
    num[id] = f0[id] * w;
    den[id] = w;
  }
  return volume_integral(fp, num) / volume_integral(fp, den);
}

/// Flux-balance integrals: boundary int phi sqrt(gamma), int H sqrt(gamma),
/// int sqrt(gamma)/W.
struct FluxPieces {
  double boundary_phi = 0.0;
  double volume_H = 0.0;
  double volume_invW = 0.0;
};

FluxPieces flux_pieces(const FlowProblem& fp, const GraphState& st) {
  const Grid& g = fp.grid;
  FluxPieces out;
  BoundaryField phig;
  for (int e = 0; e < num_edges(g); ++e) {
    const std::vector<int> ids = edge_nodes(g, e);
    phig.edge[e].resize(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      phig.edge[e][k] = fp.phi.edge[e][k] * std::sqrt(fp.samples.pts[ids[k]].gamma);
    }
  }
  out.boundary_phi = boundary_integral(fp, phig);
  std::vector<double> hfield(g.count()), wfield(g.count());
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const int id = g.id(i, j);
      const double sg = std::sqrt(fp.samples.pts[id].gamma);
      hfield[id] = fp.prescribed_curvature(g.coord(i, j)) * sg;
      wfield[id] = sg / graph_W(fp.samples.pts[id], st.du[id], g.dim);
    }
  }
  out.volume_H = volume_integral(fp, hfield);
  out.volume_invW = volume_integral(fp, wfield);
  return out;
}

/// Analytic Jacobian dF/dv of the soliton residual, with the ghost-cell
/// sensitivities folded in.
Eigen::SparseMatrix<double> build_jacobian(const FlowProblem& fp,
                                           const BoundaryClosure& closure,
                                           const std::vector<double>& v) {
  const Grid& g = fp.grid;
  const int n = g.count();
  ExtendedField ext(g);
  ext.set_interior(v);
  closure.close(ext);
  const GraphState st = state_from_extended(ext, fp.samples, g);
  const auto forms = closure.linearize(ext, true);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * (g.dim == 2 ? 16 : 4));
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const int r = g.id(i, j);
      const AmbientPoint& pt = fp.samples.pts[r];
      const Vec p = st.du[r];
      const Sym q = st.d2u[r];
      const double W = graph_W(pt, p, g.dim);
      const double W2 = W * W, W4 = W2 * W2;
      const Vec up = raise_index(pt.sigma_inv, p, g.dim);
      Sym A = pt.sigma_inv;
      for (int a = 0; a < g.dim; ++a) {
        for (int b = a; b < g.dim; ++b) A.add(a, b, -up[a] * up[b] / W2);
      }
      const double beta = 0.5 / pt.gamma + 0.5 / W2;
      const Vec gup = raise_index(pt.sigma_inv, pt.grad_gamma, g.dim);
      Vec drift{0.0, 0.0};
      for (int k = 0; k < g.dim; ++k) {
        double d = beta * gup[k];
        for (int a = 0; a < g.dim; ++a) {
          for (int b = 0; b < g.dim; ++b) d += A(a, b) * pt.christoffel.comp[k](a, b);
        }
        drift[k] = d;
      }
      const double curv = fp.prescribed_curvature(g.coord(i, j));
      const double P = contract_up(pt.sigma_inv, pt.grad_gamma, p, g.dim);

      // dPhi/dp_k = (dA^ab/dp_k) q_ab + up_k P / W^4 - drift_k - up_k H / W.
      // (dA^ab/dp_k) q_ab = -2 (sigma_inv q up)_k / W^2 + 2 up_k (up q up) / W^4.
      Vec m{0.0, 0.0};
      double s2 = 0.0;
      for (int k = 0; k < g.dim; ++k) {
        double acc = 0.0;
        for (int a = 0; a < g.dim; ++a) {
          for (int b = 0; b < g.dim; ++b) acc += pt.sigma_inv(k, a) * q(a, b) * up[b];
        }
        m[k] = acc;
      }
      for (int a = 0; a < g.dim; ++a) {
        for (int b = 0; b < g.dim; ++b) s2 += up[a] * up[b] * q(a, b);
      }
      Vec dp{0.0, 0.0};
      for (int k = 0; k < g.dim; ++k) {
        dp[k] = -2.0 * m[k] / W2 + 2.0 * up[k] * s2 / W4 + up[k] * P / W4 - drift[k] -
                up[k] * curv / W;
      }

      auto add_ext = [&](int ii, int jj, double w) {
        if (w == 0.0) return;
        const bool ghost = ii < 0 || ii >= g.n1 || (g.dim == 2 && (jj < 0 || jj >= g.n2));
        if (!ghost) {
          trips.emplace_back(r, g.id(ii, jj), w);
          return;
        }
        const GhostLinear& form = forms.at(closure.ghost_key(ii, jj));
        for (auto& [id2, c] : form.struct_terms) trips.emplace_back(r, id2, w * c);
        for (auto& [id2, c] : form.beta_jac) trips.emplace_back(r, id2, w * c);
      };

      const double h1 = g.h[0];
      add_ext(i - 1, j, A.xx / (h1 * h1) + dp[0] * (-1.0 / (2.0 * h1)));
      add_ext(i, j, -2.0 * A.xx / (h1 * h1));
      add_ext(i + 1, j, A.xx / (h1 * h1) + dp[0] * (1.0 / (2.0 * h1)));
      if (g.dim == 2) {
        const double h2 = g.h[1];
        add_ext(i, j - 1, A.yy / (h2 * h2) + dp[1] * (-1.0 / (2.0 * h2)));
        add_ext(i, j, -2.0 * A.yy / (h2 * h2));
        add_ext(i, j + 1, A.yy / (h2 * h2) + dp[1] * (1.0 / (2.0 * h2)));
        const double cx = 2.0 * A.xy / (4.0 * h1 * h2);
        add_ext(i + 1, j + 1, cx);
        add_ext(i - 1, j - 1, cx);
        add_ext(i + 1, j - 1, -cx);
        add_ext(i - 1, j + 1, -cx);
      }
    }
  }
  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

}  // namespace

double soliton_speed(const FlowProblem& fp, const GraphState& st) {
  const FluxPieces fx = flux_pieces(fp, st);
  return (fx.boundary_phi - fx.volume_H) / fx.volume_invW;
}

double flux_balance_residual(const FlowProblem& fp, const GraphState& st, double C) {
  const FluxPieces fx = flux_pieces(fp, st);
  return std::abs(fx.boundary_phi - fx.volume_H - C * fx.volume_invW);
}

SpeedBound speed_bound(const FlowProblem& fp, const GraphState& st, double C) {
  const Grid& g = fp.grid;
  double wmax = 1.0;
  std::vector<double> habs(g.count()), gfield(g.count());
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const int id = g.id(i, j);
      wmax = std::max(wmax, graph_W(fp.samples.pts[id], st.du[id], g.dim));
      const double sg = std::sqrt(fp.samples.pts[id].gamma);
      habs[id] = std::abs(fp.prescribed_curvature(g.coord(i, j))) * sg;
      gfield[id] = sg;
    }
  }
  BoundaryField ones;
  for (int e = 0; e < num_edges(g); ++e) {
    const std::vector<int> ids = edge_nodes(g, e);
    ones.edge[e].resize(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      ones.edge[e][k] = std::sqrt(fp.samples.pts[ids[k]].gamma);
    }
  }
  SpeedBound sb;
  sb.abs_speed = std::abs(C);
  sb.bound = wmax * (boundary_integral(fp, ones) + volume_integral(fp, habs)) /
             volume_integral(fp, gfield);
  sb.ok = sb.abs_speed <= sb.bound * (1.0 + 1e-12) + 1e-12;
  return sb;
}

std::vector<double> soliton_residual(const FlowProblem& fp, const std::vector<double>& v,
                                     double C) {
  const BoundaryClosure closure(fp.grid, fp.samples, fp.phi);
  const GraphState st = closed_state(fp, closure, v);
  std::vector<double> F = flow_rhs(fp, st);
  for (double& x : F) x -= C;
  return F;
}

std::vector<double> soliton_jacobian_apply(const FlowProblem& fp,
                                           const std::vector<double>& v,
                                           const std::vector<double>& w) {
  const BoundaryClosure closure(fp.grid, fp.samples, fp.phi);
  const Eigen::SparseMatrix<double> J = build_jacobian(fp, closure, v);
  Eigen::VectorXd we(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) we[static_cast<int>(i)] = w[i];
  const Eigen::VectorXd r = J * we;
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = r[static_cast<int>(i)];
  return out;
}

namespace {

SolitonResult newton_solve(const FlowProblem& fp, std::vector<double> v,
                           const SolitonOptions& opt) {
  const Grid& g = fp.grid;
  const int n = g.count();
  const BoundaryClosure closure(g, fp.samples, fp.phi);
  remove_mean(v);
  double C = soliton_speed(fp, closed_state(fp, closure, v));

  SolitonResult res;
  std::vector<double> F = soliton_residual(fp, v, C);
  double fn = max_abs(F);
  res.residual_history.push_back(fn);
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    if (fn < opt.tol) {
      res.v = std::move(v);
      res.C = C;
      res.iterations = iter;
      return res;
    }
    const Eigen::SparseMatrix<double> J = build_jacobian(fp, closure, v);
    // Bordered system: the mean constraint removes the constant kernel,
    // the extra column is dF/dC = -1.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(J.nonZeros()) + 2 * n);
    for (int k = 0; k < J.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(J, k); it; ++it) {
        trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                           it.value());
      }
    }
    for (int r = 0; r < n; ++r) {
      trips.emplace_back(r, n, -1.0);
      trips.emplace_back(n, r, 1.0);
    }
    Eigen::SparseMatrix<double> B(n + 1, n + 1);
    B.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(B);
    if (lu.info() != Eigen::Success) {
      throw SolverError("soliton solve: bordered factorization failed",
                        res.residual_history);
    }
    Eigen::VectorXd rhs(n + 1);
    for (int r = 0; r < n; ++r) rhs[r] = -F[r];
    rhs[n] = 0.0;
    const Eigen::VectorXd delta = lu.solve(rhs);

    double lambda = 1.0;
    bool accepted = false;
    for (int halve = 0; halve < 30; ++halve) {
      std::vector<double> vtry = v;
      for (int r = 0; r < n; ++r) vtry[r] += lambda * delta[r];
      const double Ctry = C + lambda * delta[n];
      std::vector<double> Ftry = soliton_residual(fp, vtry, Ctry);
      const double ftry = max_abs(Ftry);
      if (ftry < fn) {
        v = std::move(vtry);
        C = Ctry;
        F = std::move(Ftry);
        fn = ftry;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    res.residual_history.push_back(fn);
    if (!accepted) {
      throw SolverError("soliton solve: line search stalled", res.residual_history);
    }
  }
  if (fn < opt.tol) {
    res.v = std::move(v);
    res.C = C;
    res.iterations = opt.max_iter;
    return res;
  }
  throw SolverError("soliton solve: Newton did not reach the residual target",
                    res.residual_history);
}

SolitonResult pseudo_time_solve(const FlowProblem& fp, std::vector<double> v,
                                const SolitonOptions& opt) {
  const Grid& g = fp.grid;
  const BoundaryClosure closure(g, fp.samples, fp.phi);
  remove_mean(v);
  double C = weighted_mean_speed(fp, closed_state(fp, closure, v));
  SolitonResult res;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    std::vector<double> F = soliton_residual(fp, v, C);
    const double fn = max_abs(F);
    res.residual_history.push_back(fn);
    if (fn < opt.tol) {
      res.v = std::move(v);
      res.C = C;
      res.iterations = iter;
      return res;
    }
    v = semi_implicit_flow_step(fp, closure, v, opt.dt, -C);
    remove_mean(v);
    C = weighted_mean_speed(fp, closed_state(fp, closure, v));
  }
  throw SolverError("soliton solve: pseudo-time march did not reach the residual target",
                    res.residual_history);
}

}  // namespace

SolitonResult solve_soliton(const FlowProblem& fp, const std::vector<double>& v0,
                            const SolitonOptions& opt) {
  if (static_cast<int>(v0.size()) != fp.grid.count()) {
    throw ConfigError({"soliton initial guess size does not match the grid"});
  }
  if (opt.method == SolitonMethod::newton) return newton_solve(fp, v0, opt);
  return pseudo_time_solve(fp, v0, opt);
}

std::vector<std::pair<double, double>> sandwich_violations(const FlowProblem& fp,
                                                           const std::vector<double>& v,
                                                           double C,
                                                           const std::vector<double>& u0,
                                                           double dt, double t_end) {
  double lo = u0[0] - v[0], hi = u0[0] - v[0];
  for (std::size_t i = 0; i < v.size(); ++i) {
    lo = std::min(lo, u0[i] - v[i]);
    hi = std::max(hi, u0[i] - v[i]);
  }
  FlowOptions opt;
  opt.scheme = Scheme::semi_implicit;
  opt.dt = dt;
  opt.t_end = t_end;
  opt.snapshot_every = 1;
  const FlowResult fr = run_flow(fp, u0, opt);
  std::vector<std::pair<double, double>> out;
  out.reserve(fr.snapshots.size());
  for (const auto& [t, u] : fr.snapshots) {
    double viol = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double lower = v[i] + lo + C * t;
      const double upper = v[i] + hi + C * t;
      viol = std::max(viol, std::max(lower - u[i], u[i] - upper));
    }
    out.push_back({t, std::max(viol, 0.0)});
  }
  return out;
}

}  // namespace kgflow
