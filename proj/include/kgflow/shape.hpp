#pragma once

/// @file shape.hpp
/// @brief Pointwise geometry of the graph: gradient factor W, induced
///        metric, second fundamental form, mean curvature, contact angle,
///        and the tilt-gradient identity used for verification.
///
/// Conventions.  The graph of u over the leaf is parametrized by
/// X(x) = (x, u(x)); tangents E_i = d_i + u_i d_s.  The unit normal has
/// orbit component gamma/W and leaf components -u^j/W, with
/// W^2 = gamma + |grad u|^2.  The second fundamental form is
/// a(X,Y) = <N, D_X Y>, which makes upward-convex 1d graphs positive.

#include <vector>

#include "kgflow/fields.hpp"
#include "kgflow/geometry.hpp"
#include "kgflow/grid.hpp"
#include "kgflow/tensor.hpp"

namespace kgflow {

/// Ambient data cached at every grid node.
struct GeometrySamples {
  int dim = 1;
  std::vector<AmbientPoint> pts;   // indexed by node id
  bool sigma_identity = false;     // leaf metric is identity everywhere
  bool sigma_diagonal = false;     // sigma_12 == 0 at every node
};
GeometrySamples sample_geometry(const AmbientGeometry& g, const Grid& grid);

/// W = sqrt(gamma + sigma^ij u_i u_j).
double graph_W(const AmbientPoint& p, const Vec& du, int dim);

/// g_ij = sigma_ij + u_i u_j / gamma.
Sym induced_metric(const AmbientPoint& p, const Vec& du, int dim);

/// g^ij = sigma^ij - u^i u^j / W^2 (closed-form inverse of the above).
Sym induced_metric_inverse(const AmbientPoint& p, const Vec& du, double W, int dim);

/// Two algebraically identical groupings of the second fundamental form;
/// computing both and differencing is a reassociation-level consistency
/// check on the implementation.
enum class SffVariant {
  gamma_gradient,      // terms written via grad gamma / (2 gamma)
  orbit_acceleration,  // terms written via the orbit acceleration covector
};
Sym second_fundamental_form(const AmbientPoint& p, const Vec& du, const Sym& d2u_cov,
                            double W, int dim, SffVariant variant);

/// nH, either as g^ij a_ij or in divergence-expanded form.
enum class CurvatureForm { trace, divergence };
double mean_curvature(const AmbientPoint& p, const Vec& du, const Sym& d2u_cov, int dim,
                      CurvatureForm form);

/// Everything downstream consumers want at one node.
struct ShapeData {
  double W = 1.0;
  Sym g;
  Sym g_inv;
  double det_g = 1.0;
  Sym sff;
  double nH = 0.0;
  double N_vertical = 0.0;  // orbit component of the unit normal
  Vec N_horizontal{0.0, 0.0};
};
ShapeData shape_data(const AmbientPoint& p, const Vec& du, const Sym& d2u_cov, int dim);

/// |a|^2 = a_ik a_jl g^ij g^kl.
double sff_norm2(const ShapeData& sd, int dim);

/// Cosine of the angle between the graph normal and the inward conormal
/// of the boundary cylinder over edge `edge`: -s_in u^a / (W sqrt(sigma^aa)).
double contact_angle(const AmbientPoint& p, const Vec& du, double W, int edge, int dim);

/// Graph state: u with its first derivatives and covariant Hessian
/// u_{i;j} = dd u - Gamma^k_ij d_k u at every node.
struct GraphState {
  double t = 0.0;
  std::vector<double> u;
  std::vector<Vec> du;
  std::vector<Sym> d2u;
};

/// Exact derivatives from an analytic field.
GraphState state_from_analytic(const AnalyticField& f, const GeometrySamples& gs,
                               const Grid& grid, double t = 0.0);

/// Ghost-free finite differences: centered inside, one-sided at the
/// boundary, cross term composed and symmetrized.  Shape-only contexts.
GraphState state_from_values(const std::vector<double>& u, const GeometrySamples& gs,
                             const Grid& grid, double t = 0.0);

/// Centered stencils everywhere, reading the ghost ring.
GraphState state_from_extended(const ExtendedField& ext, const GeometrySamples& gs,
                               const Grid& grid, double t = 0.0);

/// Tilt of the graph against the cylinder over the level sets of a leaf
/// function d:  theta = -<grad d, grad u>_sigma / W.
double tilt_theta(const AmbientPoint& p, const Vec& du, const Vec& dd, double W, int dim);

/// Max-norm residual, over interior nodes, of the identity
///   d_i theta = -a_i^j d_j + (d_{i;j} - kappa sigma_ij) N^j,
/// kappa = -<grad gamma, grad d> / (2 gamma),  N^j = -u^j / W,
/// with the left side a centered difference of the sampled theta and the
/// right side analytic.  Second-order small for smooth data.
double tilt_identity_residual(const Grid& grid, const GeometrySamples& gs,
                              const GraphState& st, const AnalyticField& dist);

}  // namespace kgflow
