#pragma once

/// @file flow.hpp
/// @brief Prescribed-curvature graph flow with prescribed contact angle:
///        time stepping, the ghost-cell boundary closure, energy and the
///        discrete dissipation identity.
///
/// The evolution is u_t = W (nH - H(x)) on a rectangular chart, with the
/// contact-angle condition <N, nu_inward> = phi on the boundary cylinder.
/// Expanded, u_t = A^ij u_{i;j} - (1/(2 gamma) + 1/(2 W^2)) gamma^m u_m - W H
/// with A^ij = sigma^ij - u^i u^j / W^2; the semi-implicit scheme freezes
/// A, the drift and the source at the current step and solves the linear
/// system once per step, iterating only the boundary offsets.

#include <array>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgflow/grid.hpp"
#include "kgflow/shape.hpp"

namespace kgflow {

/// Scalar data on the boundary, stored per edge because the two edges
/// meeting at a corner may carry different values there.  edge[e] is
/// aligned with edge_nodes(grid, e).
struct BoundaryField {
  std::array<std::vector<double>, 4> edge;
};

BoundaryField boundary_constant(const Grid& g, double value);
BoundaryField boundary_from_function(const Grid& g,
                                     const std::function<double(const Vec&, int)>& fn);

struct FlowProblem {
  AmbientGeometry geom;
  Grid grid;
  GeometrySamples samples;
  std::function<double(const Vec&)> prescribed_curvature;  // H(x)
  BoundaryField phi;
};

/// Validates |phi| < 1 everywhere.
FlowProblem make_flow_problem(AmbientGeometry geom, const Grid& grid,
                              std::function<double(const Vec&)> curvature,
                              BoundaryField phi);

/// Ghost value expressed as an affine function of the real unknowns:
/// ghost = sum coeff*u[id] + beta, with optionally d beta / d u[id].
struct GhostLinear {
  std::vector<std::pair<int, double>> struct_terms;
  double beta = 0.0;
  std::vector<std::pair<int, double>> beta_jac;
};

/// Contact-angle closure.  At a boundary node of edge (axis a, inward s)
/// the inward-normal derivative implied by the angle is
///   u_nu = -phi sqrt((gamma + |grad_T u|^2) / (1 - phi^2)),
/// and the ghost across the node is
///   ghost = opposite interior neighbor - 2 h_a sqrt(sigma_aa) u_nu.
/// Tangential derivatives are taken along the edge with one-sided ends,
/// so the edges decouple.  Corner ghosts are cubic extrapolations along
/// the two adjacent ghost lines, averaged.  Requires sigma diagonal at
/// the boundary (the coordinate normal must be the metric normal).
class BoundaryClosure {
 public:
  BoundaryClosure(const Grid& grid, const GeometrySamples& gs, const BoundaryField& phi);

  /// Fill all ghosts of ext from its interior values.
  void close(ExtendedField& ext) const;

  /// Affine ghost forms for implicit assembly, evaluated at the interior
  /// values of ext.  Key = extended flat index (see ghost_key).
  std::unordered_map<int, GhostLinear> linearize(const ExtendedField& ext,
                                                 bool with_sensitivity) const;

  int ghost_key(int gi, int gj) const { return (gj + 1) * (grid_.n1 + 2) + (gi + 1); }

 private:
  struct Slot {
    int edge;
    int k;        // index along the edge
    int gi, gj;   // ghost position (extended indices)
    int bid;      // boundary node id
    int opp_id;   // mirrored interior neighbor id
    double step;  // 2 h_a sqrt(sigma_aa)
  };
  // u_nu and, optionally, its derivative w.r.t. the edge-node values.
  double normal_derivative(const Slot& s, const std::vector<double>& edge_vals,
                           std::vector<std::pair<int, double>>* jac) const;

  const Grid& grid_;
  const GeometrySamples& gs_;
  BoundaryField phi_;
  std::vector<Slot> slots_;
};

enum class Scheme { explicit_euler, semi_implicit };

struct FlowOptions {
  Scheme scheme = Scheme::semi_implicit;
  double dt = 0.0;          // explicit scheme: 0 selects the stability-bound step
  double t_end = 1.0;
  double steady_tol = 0.0;  // stop once max|u_t| drops below this (0 = off)
  int snapshot_every = 0;   // record u every k steps (0 = none)
  bool record_dissipation = false;
};

struct SeriesRow {
  double t = 0.0;
  double max_ut = 0.0;
  double energy = 0.0;
  double max_grad = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
};

struct FlowResult {
  GraphState final_state;
  std::vector<SeriesRow> series;
  std::vector<std::pair<double, std::vector<double>>> snapshots;
  std::vector<double> dissipation;  // per-step identity residual, if recorded
  int steps = 0;
  std::string stop_reason;          // "t_end" or "steady"
  double compatibility_gap = 0.0;   // initial one-sided angle vs phi
  bool compatible = true;
  double max_W = 1.0;
};

/// Pointwise flow speed W (nH - H) from a fully formed state.
std::vector<double> flow_rhs(const FlowProblem& fp, const GraphState& st);

/// E = int W dmu_sigma - bdry int u phi; the Lyapunov functional of the
/// flow when gamma is constant and H = 0.
double flow_energy(const FlowProblem& fp, const GraphState& st);

/// Same with both integrands weighted by 1/sqrt(gamma) (ambient volume of
/// the cylinder over the domain); reported as a diagnostic.
double flow_energy_orbit_weighted(const FlowProblem& fp, const GraphState& st);

/// Residual of the step dissipation identity
///   0 = (E1 - E0)/dt + int q^2 / Wbar + int q H + int q <grad gamma, grad ubar> / (2 gamma Wbar)
/// with q = (u1 - u0)/dt and all fields evaluated on the closed midpoint
/// state.  O(h^2 + dt) on smooth flows.
double dissipation_residual(const FlowProblem& fp, const std::vector<double>& u0,
                            const std::vector<double>& u1, double dt);

/// sum over nodes of w_trapezoid * sqrt(det sigma) * f.
double volume_integral(const FlowProblem& fp, const std::vector<double>& f);

/// sum over edges of w_edge * sqrt(sigma_tt) * f(edge value); f is given
/// per edge like a BoundaryField.
double boundary_integral(const FlowProblem& fp, const BoundaryField& f);

/// Largest stable explicit step: 0.2 h_min^2 / max_node(sum_i A^ii).
double explicit_step_bound(const FlowProblem& fp, const GraphState& st);

/// One semi-implicit step with an extra constant added to the right-hand
/// side (the pseudo-time soliton iteration passes -C; plain flow passes 0).
std::vector<double> semi_implicit_flow_step(const FlowProblem& fp,
                                            const BoundaryClosure& closure,
                                            const std::vector<double>& u, double dt,
                                            double extra_source);

/// March the flow from u0.
FlowResult run_flow(const FlowProblem& fp, const std::vector<double>& u0,
                    const FlowOptions& opt);

/// Max over boundary nodes of |one-sided contact angle of u - phi|.
double compatibility_gap(const FlowProblem& fp, const std::vector<double>& u);

}  // namespace kgflow
