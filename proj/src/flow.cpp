/// @file flow.cpp

#include "kgflow/flow.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "kgflow/errors.hpp"

namespace kgflow {

namespace {

constexpr double kBlowupW = 1e8;
constexpr double kBetaTol = 1e-10;
constexpr int kBetaMaxIter = 50;

/// Frozen per-node coefficients of the quasilinear form
/// u_t = A^ij dd_ij u - drift^k d_k u + source.
struct NodeCoeffs {
  Sym A;
  Vec drift{0.0, 0.0};
  double source = 0.0;
};

NodeCoeffs node_coeffs(const AmbientPoint& p, const Vec& du, double curvature, int dim) {
  NodeCoeffs nc;
  const double W = graph_W(p, du, dim);
  const Vec up = raise_index(p.sigma_inv, du, dim);
  nc.A = p.sigma_inv;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) nc.A.add(i, j, -up[i] * up[j] / (W * W));
  }
  const double beta = 0.5 / p.gamma + 0.5 / (W * W);
  const Vec gup = raise_index(p.sigma_inv, p.grad_gamma, dim);
  for (int k = 0; k < dim; ++k) {
    double v = beta * gup[k];
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) v += nc.A(i, j) * p.christoffel.comp[k](i, j);
    }
    nc.drift[k] = v;
  }
  nc.source = -W * curvature;
  return nc;
}

}  // namespace

BoundaryField boundary_constant(const Grid& g, double value) {
  BoundaryField bf;
  for (int e = 0; e < num_edges(g); ++e) {
    bf.edge[e].assign(edge_nodes(g, e).size(), value);
  }
  return bf;
}

BoundaryField boundary_from_function(const Grid& g,
                                     const std::function<double(const Vec&, int)>& fn) {
  BoundaryField bf;
  for (int e = 0; e < num_edges(g); ++e) {
    const std::vector<int> ids = edge_nodes(g, e);
    bf.edge[e].resize(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const int i = ids[k] % g.n1, j = ids[k] / g.n1;
      bf.edge[e][k] = fn(g.coord(i, j), e);
    }
  }
  return bf;
}

FlowProblem make_flow_problem(AmbientGeometry geom, const Grid& grid,
                              std::function<double(const Vec&)> curvature,
                              BoundaryField phi) {
  FlowProblem fp;
  fp.geom = std::move(geom);
  fp.grid = grid;
  fp.samples = sample_geometry(fp.geom, grid);
  fp.prescribed_curvature = std::move(curvature);
  fp.phi = std::move(phi);
  for (int e = 0; e < num_edges(grid); ++e) {
    if (fp.phi.edge[e].size() != edge_nodes(grid, e).size()) {
      throw ConfigError({"contact-angle data does not match the edge node count"});
    }
    for (double v : fp.phi.edge[e]) {
      if (!(std::abs(v) < 1.0)) {
        throw ConfigError({"contact angle must satisfy |phi| < 1 on the whole boundary"});
      }
    }
  }
  return fp;
}

BoundaryClosure::BoundaryClosure(const Grid& grid, const GeometrySamples& gs,
                                 const BoundaryField& phi)
    : grid_(grid), gs_(gs), phi_(phi) {
  for (int e = 0; e < num_edges(grid); ++e) {
    const EdgeInfo info = edge_info(e);
    const std::vector<int> ids = edge_nodes(grid, e);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      Slot s;
      s.edge = e;
      s.k = static_cast<int>(k);
      s.bid = ids[k];
      const int i = ids[k] % grid.n1, j = ids[k] / grid.n1;
      const AmbientPoint& p = gs.pts[s.bid];
      if (grid.dim == 2 && p.sigma.xy != 0.0) {
        throw UnsupportedRegimeError(
            "contact-angle closure needs a diagonal leaf metric on the boundary");
      }
      const double saa = info.axis == 0 ? p.sigma.xx : p.sigma.yy;
      s.step = 2.0 * grid.h[info.axis] * std::sqrt(saa);
      if (info.axis == 0) {
        s.gi = info.inward_sign > 0 ? -1 : grid.n1;
        s.gj = j;
        s.opp_id = grid.id(info.inward_sign > 0 ? 1 : grid.n1 - 2, j);
      } else {
        s.gi = i;
        s.gj = info.inward_sign > 0 ? -1 : grid.n2;
        s.opp_id = grid.id(i, info.inward_sign > 0 ? 1 : grid.n2 - 2);
      }
      slots_.push_back(s);
    }
  }
}

double BoundaryClosure::normal_derivative(const Slot& s, const std::vector<double>& edge_vals,
                                          std::vector<std::pair<int, double>>* jac) const {
  const AmbientPoint& p = gs_.pts[s.bid];
  const double phi = phi_.edge[s.edge][s.k];
  double q = 0.0;        // |grad_T u|^2
  double ut = 0.0;       // tangential derivative
  double stt_inv = 0.0;  // sigma^tt
  const int m = static_cast<int>(edge_vals.size());
  if (grid_.dim == 2) {
    const int taxis = 1 - edge_info(s.edge).axis;
    const double ht = grid_.h[taxis];
    ut = line_d1(edge_vals.data(), m, s.k, ht);
    const double stt = taxis == 0 ? p.sigma.xx : p.sigma.yy;
    stt_inv = 1.0 / stt;
    q = stt_inv * ut * ut;
  }
  const double unu = -phi * std::sqrt((p.gamma + q) / (1.0 - phi * phi));
  if (jac != nullptr) {
    jac->clear();
    if (grid_.dim == 2 && unu != 0.0) {
      // d unu / d u_m = unu * sigma^tt ut / (gamma + q) * c_m.
      const double scale = unu * stt_inv * ut / (p.gamma + q);
      const int taxis = 1 - edge_info(s.edge).axis;
      const double ht = grid_.h[taxis];
      const std::vector<int> ids = edge_nodes(grid_, s.edge);
      auto push = [&](int kk, double c) { jac->push_back({ids[kk], scale * c}); };
      if (s.k == 0) {
        push(0, -1.5 / ht);
        push(1, 2.0 / ht);
        push(2, -0.5 / ht);
      } else if (s.k == m - 1) {
        push(m - 1, 1.5 / ht);
        push(m - 2, -2.0 / ht);
        push(m - 3, 0.5 / ht);
      } else {
        push(s.k - 1, -0.5 / ht);
        push(s.k + 1, 0.5 / ht);
      }
    }
  }
  return unu;
}

void BoundaryClosure::close(ExtendedField& ext) const {
  std::array<std::vector<double>, 4> vals;
  for (int e = 0; e < num_edges(grid_); ++e) {
    const std::vector<int> ids = edge_nodes(grid_, e);
    vals[e].resize(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      vals[e][k] = ext.at(ids[k] % grid_.n1, ids[k] / grid_.n1);
    }
  }
  for (const Slot& s : slots_) {
    const double unu = normal_derivative(s, vals[s.edge], nullptr);
    ext.at(s.gi, s.gj) =
        ext.at(s.opp_id % grid_.n1, s.opp_id / grid_.n1) - s.step * unu;
  }
  ext.fill_corners();
}

std::unordered_map<int, GhostLinear> BoundaryClosure::linearize(const ExtendedField& ext,
                                                                bool with_sensitivity) const {
  std::unordered_map<int, GhostLinear> forms;
  std::array<std::vector<double>, 4> vals;
  for (int e = 0; e < num_edges(grid_); ++e) {
    const std::vector<int> ids = edge_nodes(grid_, e);
    vals[e].resize(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      vals[e][k] = ext.at(ids[k] % grid_.n1, ids[k] / grid_.n1);
    }
  }
  std::vector<std::pair<int, double>> jac;
  for (const Slot& s : slots_) {
    const double unu =
        normal_derivative(s, vals[s.edge], with_sensitivity ? &jac : nullptr);
    GhostLinear gl;
    gl.struct_terms.push_back({s.opp_id, 1.0});
    gl.beta = -s.step * unu;
    if (with_sensitivity) {
      for (auto& [id, v] : jac) gl.beta_jac.push_back({id, -s.step * v});
    }
    forms[ghost_key(s.gi, s.gj)] = std::move(gl);
  }
  if (grid_.dim == 2) {
    // Corner ghosts: the same cubic combination fill_corners() applies,
    // expressed through the edge-ghost forms.
    const int ci[4] = {-1, grid_.n1, -1, grid_.n1};
    const int cj[4] = {-1, -1, grid_.n2, grid_.n2};
    const double w[4] = {4.0, -6.0, 4.0, -1.0};
    for (int c = 0; c < 4; ++c) {
      const int i = ci[c], j = cj[c];
      const int si = i == -1 ? 1 : -1;
      const int sj = j == -1 ? 1 : -1;
      GhostLinear gl;
      auto accumulate = [&](int gi, int gj, double coeff) {
        const GhostLinear& src = forms.at(ghost_key(gi, gj));
        for (auto& [id, v] : src.struct_terms) gl.struct_terms.push_back({id, coeff * v});
        gl.beta += coeff * src.beta;
        for (auto& [id, v] : src.beta_jac) gl.beta_jac.push_back({id, coeff * v});
      };
      for (int m = 0; m < 4; ++m) {
        accumulate(i + (m + 1) * si, j, 0.5 * w[m]);  // along the ghost row
        accumulate(i, j + (m + 1) * sj, 0.5 * w[m]);  // along the ghost column
      }
      forms[ghost_key(i, j)] = std::move(gl);
    }
  }
  return forms;
}

std::vector<double> flow_rhs(const FlowProblem& fp, const GraphState& st) {
  const Grid& g = fp.grid;
  std::vector<double> ut(g.count());
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const int id = g.id(i, j);
      const ShapeData sd = shape_data(fp.samples.pts[id], st.du[id], st.d2u[id], g.dim);
      ut[id] = sd.W * (sd.nH - fp.prescribed_curvature(g.coord(i, j)));
    }
  }
  return ut;
}

double volume_integral(const FlowProblem& fp, const std::vector<double>& f) {
  const std::vector<double> w = volume_weights(fp.grid);
  double s = 0.0;
  for (int id = 0; id < fp.grid.count(); ++id) {
    s += w[id] * fp.samples.pts[id].sqrt_det_sigma * f[id];
  }
  return s;
}

double boundary_integral(const FlowProblem& fp, const BoundaryField& f) {
  const Grid& g = fp.grid;
  double s = 0.0;
  for (int e = 0; e < num_edges(g); ++e) {
    const std::vector<int> ids = edge_nodes(g, e);
    const std::vector<double> w = boundary_weights(g, e);
    const int taxis = 1 - edge_info(e).axis;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (w[k] == 0.0) continue;
      double len = 1.0;
      if (g.dim == 2) {
        const Sym& sig = fp.samples.pts[ids[k]].sigma;
        len = std::sqrt(taxis == 0 ? sig.xx : sig.yy);
      }
      s += w[k] * len * f.edge[e][k];
    }
  }
  return s;
}

namespace {

double energy_impl(const FlowProblem& fp, const GraphState& st, bool orbit_weighted) {
  const Grid& g = fp.grid;
  std::vector<double> wfield(g.count());
  for (int id = 0; id < g.count(); ++id) {
    const double wgt =
        orbit_weighted ? 1.0 / std::sqrt(fp.samples.pts[id].gamma) : 1.0;
    wfield[id] = wgt * graph_W(fp.samples.pts[id], st.du[id], g.dim);
  }
  BoundaryField uphi;
  for (int e = 0; e < num_edges(g); ++e) {
    const std::vector<int> ids = edge_nodes(g, e);
    uphi.edge[e].resize(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const double wgt =
          orbit_weighted ? 1.0 / std::sqrt(fp.samples.pts[ids[k]].gamma) : 1.0;
      uphi.edge[e][k] = wgt * st.u[ids[k]] * fp.phi.edge[e][k];
    }
  }
  return volume_integral(fp, wfield) - boundary_integral(fp, uphi);
}

}  // namespace

double flow_energy(const FlowProblem& fp, const GraphState& st) {
  return energy_impl(fp, st, false);
}

double flow_energy_orbit_weighted(const FlowProblem& fp, const GraphState& st) {
  return energy_impl(fp, st, true);
}

double dissipation_residual(const FlowProblem& fp, const std::vector<double>& u0,
                            const std::vector<double>& u1, double dt) {
  const Grid& g = fp.grid;
  const BoundaryClosure closure(g, fp.samples, fp.phi);
  auto closed_state = [&](const std::vector<double>& u) {
    ExtendedField ext(g);
    ext.set_interior(u);
    closure.close(ext);
    return state_from_extended(ext, fp.samples, g);
  };
  const GraphState s0 = closed_state(u0);
  const GraphState s1 = closed_state(u1);
  std::vector<double> umid(g.count());
  for (int id = 0; id < g.count(); ++id) umid[id] = 0.5 * (u0[id] + u1[id]);
  const GraphState sm = closed_state(umid);

  const double e0 = flow_energy(fp, s0);
  const double e1 = flow_energy(fp, s1);
  std::vector<double> integrand(g.count());
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const int id = g.id(i, j);
      const AmbientPoint& p = fp.samples.pts[id];
      const double q = (u1[id] - u0[id]) / dt;
      const double Wbar = graph_W(p, sm.du[id], g.dim);
      const double pgu = contract_up(p.sigma_inv, p.grad_gamma, sm.du[id], g.dim);
      integrand[id] = q * q / Wbar + q * fp.prescribed_curvature(g.coord(i, j)) +
                      q * pgu / (2.0 * p.gamma * Wbar);
    }
  }
  return std::abs((e1 - e0) / dt + volume_integral(fp, integrand));
}

double explicit_step_bound(const FlowProblem& fp, const GraphState& st) {
  const Grid& g = fp.grid;
  double amax = 0.0;
  for (int id = 0; id < g.count(); ++id) {
    const NodeCoeffs nc = node_coeffs(fp.samples.pts[id], st.du[id], 0.0, g.dim);
    double tr = nc.A.xx;
    if (g.dim == 2) tr += nc.A.yy;
    amax = std::max(amax, tr);
  }
  const double h = g.min_h();
  return 0.2 * h * h / std::max(amax, 1e-300);
}

double compatibility_gap(const FlowProblem& fp, const std::vector<double>& u) {
  const Grid& g = fp.grid;
  const GraphState st = state_from_values(u, fp.samples, g);
  double gap = 0.0;
  for (int e = 0; e < num_edges(g); ++e) {
    const std::vector<int> ids = edge_nodes(g, e);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const int id = ids[k];
      const AmbientPoint& p = fp.samples.pts[id];
      const double W = graph_W(p, st.du[id], g.dim);
      const double ang = contact_angle(p, st.du[id], W, e, g.dim);
      gap = std::max(gap, std::abs(ang - fp.phi.edge[e][k]));
    }
  }
  return gap;
}

namespace {

struct SemiImplicitWorkspace {
  Eigen::SparseMatrix<double> M;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  std::vector<std::vector<std::pair<int, double>>> row_ghost;  // (ghost key, L-coeff)
  std::vector<double> base_rhs;
};

}  // namespace

/// Freeze A, drift and source at u, fold the structural ghost terms into
/// the matrix, then fixed-point the boundary offsets (which depend on the
/// new tangential derivatives).
std::vector<double> semi_implicit_flow_step(const FlowProblem& fp,
                                            const BoundaryClosure& closure,
                                            const std::vector<double>& u, double dt,
                                            double extra_source) {
  const Grid& g = fp.grid;
  const int n = g.count();
  ExtendedField ext(g);
  ext.set_interior(u);
  closure.close(ext);
  const GraphState st = state_from_extended(ext, fp.samples, g);
  auto forms = closure.linearize(ext, false);

  SemiImplicitWorkspace ws;
  ws.row_ghost.assign(n, {});
  ws.base_rhs.resize(n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * (g.dim == 2 ? 12 : 4));

  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const int r = g.id(i, j);
      const NodeCoeffs nc = node_coeffs(fp.samples.pts[r], st.du[r],
                                        fp.prescribed_curvature(g.coord(i, j)), g.dim);
      ws.base_rhs[r] = u[r] + dt * (nc.source + extra_source);
      trips.emplace_back(r, r, 1.0);
      auto add = [&](int ii, int jj, double c) {
        if (c == 0.0) return;
        const bool ghost = ii < 0 || ii >= g.n1 || (g.dim == 2 && (jj < 0 || jj >= g.n2));
        if (!ghost) {
          trips.emplace_back(r, g.id(ii, jj), -dt * c);
          return;
        }
        const GhostLinear& form = forms.at(closure.ghost_key(ii, jj));
        for (auto& [id2, w] : form.struct_terms) trips.emplace_back(r, id2, -dt * c * w);
        ws.row_ghost[r].push_back({closure.ghost_key(ii, jj), c});
      };
      const double h1 = g.h[0];
      add(i - 1, j, nc.A.xx / (h1 * h1) + nc.drift[0] / (2.0 * h1));
      add(i, j, -2.0 * nc.A.xx / (h1 * h1));
      add(i + 1, j, nc.A.xx / (h1 * h1) - nc.drift[0] / (2.0 * h1));
      if (g.dim == 2) {
        const double h2 = g.h[1];
        add(i, j - 1, nc.A.yy / (h2 * h2) + nc.drift[1] / (2.0 * h2));
        add(i, j, -2.0 * nc.A.yy / (h2 * h2));
        add(i, j + 1, nc.A.yy / (h2 * h2) - nc.drift[1] / (2.0 * h2));
        const double cx = nc.A.xy / (2.0 * h1 * h2);
        add(i + 1, j + 1, cx);
        add(i - 1, j - 1, cx);
        add(i + 1, j - 1, -cx);
        add(i - 1, j + 1, -cx);
      }
    }
  }
  ws.M.resize(n, n);
  ws.M.setFromTriplets(trips.begin(), trips.end());
  ws.lu.compute(ws.M);
  if (ws.lu.info() != Eigen::Success) {
    throw SolverError("semi-implicit step: sparse factorization failed", {});
  }

  // Fixed point on the boundary offsets.
  auto beta_of = [&](const std::vector<double>& v) {
    ExtendedField e2(g);
    e2.set_interior(v);  // linearize reads interior values only
    auto f2 = closure.linearize(e2, false);
    std::unordered_map<int, double> b;
    for (auto& [key, form] : f2) b[key] = form.beta;
    return b;
  };
  std::unordered_map<int, double> beta = beta_of(u);
  std::vector<double> sol = u;
  for (int it = 0; it < kBetaMaxIter; ++it) {
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
      double v = ws.base_rhs[r];
      for (auto& [key, c] : ws.row_ghost[r]) v += dt * c * beta.at(key);
      rhs[r] = v;
    }
    Eigen::VectorXd x = ws.lu.solve(rhs);
    for (int r = 0; r < n; ++r) sol[r] = x[r];
    auto beta_new = beta_of(sol);
    double dmax = 0.0;
    for (auto& [key, v] : beta_new) dmax = std::max(dmax, std::abs(v - beta.at(key)));
    beta = std::move(beta_new);
    if (dmax < kBetaTol) break;
  }
  return sol;
}

FlowResult run_flow(const FlowProblem& fp, const std::vector<double>& u0,
                    const FlowOptions& opt) {
  const Grid& g = fp.grid;
  if (static_cast<int>(u0.size()) != g.count()) {
    throw ConfigError({"initial data size does not match the grid"});
  }
  if (opt.scheme == Scheme::semi_implicit && !(opt.dt > 0.0)) {
    throw ConfigError({"run.dt must be positive for the semi-implicit scheme"});
  }
  if (!(opt.t_end > 0.0)) throw ConfigError({"run.t_end must be positive"});

  const BoundaryClosure closure(g, fp.samples, fp.phi);
  FlowResult res;
  res.compatibility_gap = compatibility_gap(fp, u0);
  {
    double phimax = 0.0;
    for (int e = 0; e < num_edges(g); ++e) {
      for (double v : fp.phi.edge[e]) phimax = std::max(phimax, std::abs(v));
    }
    const double h = g.min_h();
    res.compatible =
        res.compatibility_gap <= std::max(1e-6, 20.0 * h * h) * (1.0 + phimax);
  }

  auto closed_state = [&](const std::vector<double>& u, double t) {
    ExtendedField ext(g);
    ext.set_interior(u);
    closure.close(ext);
    return state_from_extended(ext, fp.samples, g, t);
  };
  auto record = [&](const GraphState& st, double max_ut) {
    SeriesRow row;
    row.t = st.t;
    row.max_ut = max_ut;
    row.energy = flow_energy(fp, st);
    double gmax = 0.0, umin = st.u[0], umax = st.u[0];
    for (int id = 0; id < g.count(); ++id) {
      const AmbientPoint& p = fp.samples.pts[id];
      gmax = std::max(gmax, std::sqrt(std::max(
                                0.0, contract_up(p.sigma_inv, st.du[id], st.du[id], g.dim))));
      umin = std::min(umin, st.u[id]);
      umax = std::max(umax, st.u[id]);
      res.max_W = std::max(res.max_W, graph_W(p, st.du[id], g.dim));
    }
    row.max_grad = gmax;
    row.u_min = umin;
    row.u_max = umax;
    res.series.push_back(row);
  };

  std::vector<double> u = u0;
  double t = 0.0;
  GraphState st = closed_state(u, 0.0);
  {
    const std::vector<double> ut0 = flow_rhs(fp, st);
    double m = 0.0;
    for (double v : ut0) m = std::max(m, std::abs(v));
    record(st, m);
  }
  if (opt.snapshot_every > 0) res.snapshots.push_back({0.0, u});

  res.stop_reason = "t_end";
  const double t_eps = 1e-12 * std::max(1.0, opt.t_end);
  while (t < opt.t_end - t_eps) {
    double dt = opt.dt;
    if (opt.scheme == Scheme::explicit_euler && !(dt > 0.0)) {
      dt = explicit_step_bound(fp, st);
    }
    dt = std::min(dt, opt.t_end - t);

    std::vector<double> unew;
    if (opt.scheme == Scheme::semi_implicit) {
      unew = semi_implicit_flow_step(fp, closure, u, dt, 0.0);
    } else {
      const std::vector<double> ut = flow_rhs(fp, st);
      unew = u;
      for (int id = 0; id < g.count(); ++id) unew[id] += dt * ut[id];
    }
    double qmax = 0.0;
    for (int id = 0; id < g.count(); ++id) {
      qmax = std::max(qmax, std::abs(unew[id] - u[id]) / dt);
    }
    if (opt.record_dissipation) {
      res.dissipation.push_back(dissipation_residual(fp, u, unew, dt));
    }
    t += dt;
    ++res.steps;
    std::swap(u, unew);
    st = closed_state(u, t);
    record(st, qmax);
    if (opt.snapshot_every > 0 && res.steps % opt.snapshot_every == 0) {
      res.snapshots.push_back({t, u});
    }
    if (res.max_W > kBlowupW) {
      throw SolverError("flow gradient blow-up: W exceeded 1e8", {res.max_W});
    }
    if (opt.steady_tol > 0.0 && qmax < opt.steady_tol) {
      res.stop_reason = "steady";
      break;
    }
  }
  if (opt.snapshot_every > 0 &&
      (res.snapshots.empty() || res.snapshots.back().first != t)) {
    res.snapshots.push_back({t, u});
  }
  res.final_state = st;
  return res;
}

}  // namespace kgflow
