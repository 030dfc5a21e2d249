#pragma once

/// @file stationary.hpp
/// @brief Translating solitons of the graph flow: profiles v with
///        W (nH - H) = C for a constant orbit speed C, their speed from
///        the flux balance, and barrier (sandwich) checks.

#include <string>
#include <vector>

#include "kgflow/flow.hpp"

namespace kgflow {

enum class SolitonMethod { newton, pseudo_time };

struct SolitonOptions {
  SolitonMethod method = SolitonMethod::newton;
  double tol = 1e-10;      // max-norm residual target
  int max_iter = 50;       // Newton iterations / pseudo-time sweep blocks
  double dt = 1e-2;        // pseudo-time step
};

struct SolitonResult {
  std::vector<double> v;   // mean-zero profile
  double C = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Speed from the flux balance on a given state:
///   C = (bdry int phi sqrt(gamma) - int H sqrt(gamma)) / int sqrt(gamma)/W.
double soliton_speed(const FlowProblem& fp, const GraphState& st);

/// |bdry int phi sqrt(gamma) - int H sqrt(gamma) - C int sqrt(gamma)/W|.
double flux_balance_residual(const FlowProblem& fp, const GraphState& st, double C);

/// A priori bound |C| <= W_max (bdry int sqrt(gamma) + int |H| sqrt(gamma))
///                        / int sqrt(gamma), using the observed max of W.
struct SpeedBound {
  double abs_speed = 0.0;
  double bound = 0.0;
  bool ok = true;
};
SpeedBound speed_bound(const FlowProblem& fp, const GraphState& st, double C);

/// Residual F(v, C) = W (nH - H) - C at every node, with the same
/// ghost-closed discretization the flow uses.
std::vector<double> soliton_residual(const FlowProblem& fp, const std::vector<double>& v,
                                     double C);

/// Action w -> (dF/dv) w of the analytic Jacobian at v (the C column is
/// the constant -1 and is omitted).  Exposed for verification against
/// finite differences of soliton_residual.
std::vector<double> soliton_jacobian_apply(const FlowProblem& fp,
                                           const std::vector<double>& v,
                                           const std::vector<double>& w);

/// Solve for (v, C).  Newton solves the bordered system
///   [ J   -1 ] [dv]   [-F]
///   [ 1^T  0 ] [dC] = [ 0 ]
/// (the constant kernel of J is removed by the mean constraint), with
/// step halving on the max-norm.  The pseudo-time method marches
/// v_t = W(nH - H) - C semi-implicitly, re-centering v each step and
/// refreshing C as the sqrt(gamma)/W-weighted mean of the pointwise
/// speed, the constant whose removal zeroes the weighted residual
/// integral exactly (the boundary-flux speed matches it only to
/// quadrature accuracy).  Throws SolverError (carrying the residual
/// history) if the target is not reached.
SolitonResult solve_soliton(const FlowProblem& fp, const std::vector<double>& v0,
                            const SolitonOptions& opt);

/// Barrier check: run the flow from u0 and measure how far it escapes the
/// translating envelope [v + min(u0-v) + C t, v + max(u0-v) + C t].
/// Returns (t, violation) per recorded step; exact solutions stay at 0 up
/// to the scheme's O(h^2 + dt) drift per unit time.
std::vector<std::pair<double, double>> sandwich_violations(const FlowProblem& fp,
                                                           const std::vector<double>& v,
                                                           double C,
                                                           const std::vector<double>& u0,
                                                           double dt, double t_end);

}  // namespace kgflow
