#pragma once

/// @file grid.hpp
/// @brief Uniform rectangular chart grid, ghost-ring field container,
///        finite-difference stencils and trapezoid quadrature weights.

#include <vector>

#include "kgflow/tensor.hpp"

namespace kgflow {

/// Node-centered uniform grid on [lo1,hi1] x [lo2,hi2].  Node ids are
/// x1-fastest: id = j*n1 + i.  In one dimension n2 == 1 and the x2 data
/// is inert.
struct Grid {
  int dim = 1;
  int n1 = 0;
  int n2 = 1;
  Vec lo{0.0, 0.0};
  Vec hi{0.0, 0.0};
  Vec h{0.0, 0.0};

  int count() const { return n1 * n2; }
  int id(int i, int j) const { return j * n1 + i; }
  Vec coord(int i, int j) const {
    Vec x{lo[0] + i * h[0], 0.0};
    if (dim == 2) x[1] = lo[1] + j * h[1];
    return x;
  }
  bool on_boundary(int i, int j) const {
    if (i == 0 || i == n1 - 1) return true;
    return dim == 2 && (j == 0 || j == n2 - 1);
  }
  double min_h() const { return dim == 2 ? (h[0] < h[1] ? h[0] : h[1]) : h[0]; }
};

/// Throws ConfigError on degenerate extents or fewer than 4 nodes per axis
/// (the one-sided stencils need 4 points).
Grid make_grid(int dim, Vec lo, Vec hi, int n1, int n2);

/// Boundary edges: 0 = x1 min, 1 = x1 max, 2 = x2 min, 3 = x2 max.
/// A 1d grid has edges 0 and 1 only.
struct EdgeInfo {
  int axis = 0;         // coordinate axis normal to the edge
  int inward_sign = 1;  // +1 when the interior lies in +axis direction
};
EdgeInfo edge_info(int edge);
int num_edges(const Grid& g);

/// Node ids along an edge, ordered by the tangential coordinate.  A 1d
/// edge is a single node.
std::vector<int> edge_nodes(const Grid& g, int edge);

/// Coordinate-measure trapezoid weights per node: prod(h) with factor 1/2
/// per boundary-touching axis (corners get 1/4).  Metric volume factors
/// are applied by the caller.
std::vector<double> volume_weights(const Grid& g);

/// Edge quadrature weights aligned with edge_nodes.  2d: h_tangent at
/// edge-interior nodes, zero at the two corner nodes -- each corner's
/// boundary data belongs ambiguously to two edges, so corners carry no
/// boundary measure.  1d: the single node has weight 1 (counting measure).
std::vector<double> boundary_weights(const Grid& g, int edge);

/// First/second derivative along a sampled line, second order everywhere:
/// centered in the interior, one-sided (3-point / 4-point) at the ends.
double line_d1(const double* f, int n, int k, double h);
double line_d2(const double* f, int n, int k, double h);

/// Coordinate derivatives of a scalar at one node.
struct PartialDerivs {
  Vec d1{0.0, 0.0};  // (d/dx1, d/dx2)
  Sym d2;            // Hessian entries d11, d12, d22
};

/// Scalar field on the grid extended by one ghost ring on every side.
/// Interior nodes live at (i,j) in [0,n1) x [0,n2); ghosts at index -1 and
/// n.  All centered stencils then apply at every real node.
class ExtendedField {
 public:
  explicit ExtendedField(const Grid& g);

  double& at(int i, int j) { return data_[index(i, j)]; }
  double at(int i, int j) const { return data_[index(i, j)]; }

  /// Copy real-node values from an id-indexed vector.
  void set_interior(const std::vector<double>& u);

  /// Fill the four corner ghosts by cubic extrapolation along each of the
  /// two adjacent ghost lines, averaged.  Requires the edge ghosts to be
  /// populated first.  No-op in 1d.
  void fill_corners();

  /// Centered 2nd-order derivatives at a real node; reads ghosts at the
  /// boundary.  Cross term is the standard 4-point /(4 h1 h2) stencil.
  PartialDerivs derivatives_at(int i, int j) const;

 private:
  int index(int i, int j) const { return (j + 1) * (n1_ + 2) + (i + 1); }
  int dim_;
  int n1_, n2_;
  Vec h_;
  std::vector<double> data_;
};

}  // namespace kgflow
