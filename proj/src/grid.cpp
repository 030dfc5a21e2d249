/// @file grid.cpp

#include "kgflow/grid.hpp"

#include <cmath>

#include "kgflow/errors.hpp"

namespace kgflow {

Grid make_grid(int dim, Vec lo, Vec hi, int n1, int n2) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError({"grid dimension must be 1 or 2"});
  Grid g;
  g.dim = dim;
  g.n1 = n1;
  g.n2 = dim == 2 ? n2 : 1;
  g.lo = lo;
  g.hi = hi;
  if (!(hi[0] > lo[0]) || (dim == 2 && !(hi[1] > lo[1]))) {
    throw ConfigError({"grid extents must satisfy hi > lo on every axis"});
  }
  if (n1 < 4 || (dim == 2 && n2 < 4)) {
    throw ConfigError({"grids need at least 4 nodes per axis"});
  }
  g.h[0] = (hi[0] - lo[0]) / (n1 - 1);
  g.h[1] = dim == 2 ? (hi[1] - lo[1]) / (n2 - 1) : 0.0;
  return g;
}

EdgeInfo edge_info(int edge) {
  switch (edge) {
    case 0: return {0, +1};
    case 1: return {0, -1};
    case 2: return {1, +1};
    case 3: return {1, -1};
    default: throw ConfigError({"edge index must be in [0,3]"});
  }
}

int num_edges(const Grid& g) { return g.dim == 2 ? 4 : 2; }

std::vector<int> edge_nodes(const Grid& g, int edge) {
  std::vector<int> ids;
  if (g.dim == 1) {
    if (edge == 0) ids.push_back(g.id(0, 0));
    else if (edge == 1) ids.push_back(g.id(g.n1 - 1, 0));
    else throw ConfigError({"1d grids have edges 0 and 1 only"});
    return ids;
  }
  switch (edge) {
    case 0:
      for (int j = 0; j < g.n2; ++j) ids.push_back(g.id(0, j));
      break;
    case 1:
      for (int j = 0; j < g.n2; ++j) ids.push_back(g.id(g.n1 - 1, j));
      break;
    case 2:
      for (int i = 0; i < g.n1; ++i) ids.push_back(g.id(i, 0));
      break;
    case 3:
      for (int i = 0; i < g.n1; ++i) ids.push_back(g.id(i, g.n2 - 1));
      break;
    default:
      throw ConfigError({"edge index must be in [0,3]"});
  }
  return ids;
}

std::vector<double> volume_weights(const Grid& g) {
  std::vector<double> w(g.count());
  for (int j = 0; j < g.n2; ++j) {
    const double wj = g.dim == 2 ? ((j == 0 || j == g.n2 - 1) ? 0.5 : 1.0) * g.h[1] : 1.0;
    for (int i = 0; i < g.n1; ++i) {
      const double wi = ((i == 0 || i == g.n1 - 1) ? 0.5 : 1.0) * g.h[0];
      w[g.id(i, j)] = wi * wj;
    }
  }
  return w;
}

std::vector<double> boundary_weights(const Grid& g, int edge) {
  const std::vector<int> ids = edge_nodes(g, edge);
  std::vector<double> w(ids.size(), 0.0);
  if (g.dim == 1) {
    w[0] = 1.0;  // boundary of an interval: counting measure
    return w;
  }
  const int axis = edge_info(edge).axis;
  const double ht = g.h[1 - axis];
  for (std::size_t k = 1; k + 1 < w.size(); ++k) w[k] = ht;
  return w;
}

double line_d1(const double* f, int n, int k, double h) {
  if (k == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  if (k == n - 1) return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return (f[k + 1] - f[k - 1]) / (2.0 * h);
}

double line_d2(const double* f, int n, int k, double h) {
  const double h2 = h * h;
  if (k == 0) return (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  if (k == n - 1) return (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return (f[k + 1] - 2.0 * f[k] + f[k - 1]) / h2;
}

ExtendedField::ExtendedField(const Grid& g)
    : dim_(g.dim), n1_(g.n1), n2_(g.n2), h_(g.h), data_((g.n1 + 2) * (g.n2 + 2), 0.0) {}

void ExtendedField::set_interior(const std::vector<double>& u) {
  for (int j = 0; j < n2_; ++j) {
    for (int i = 0; i < n1_; ++i) at(i, j) = u[j * n1_ + i];
  }
}

void ExtendedField::fill_corners() {
  if (dim_ == 1) return;
  // Ghost corner ~ cubic extrapolation (4,-6,4,-1) along the adjacent ghost
  // row and ghost column; the two estimates are averaged.
  const int ci[4] = {-1, n1_, -1, n1_};
  const int cj[4] = {-1, -1, n2_, n2_};
  for (int c = 0; c < 4; ++c) {
    const int i = ci[c], j = cj[c];
    const int si = i == -1 ? 1 : -1;   // step into the grid along x1
    const int sj = j == -1 ? 1 : -1;
    const double along_row = 4.0 * at(i + si, j) - 6.0 * at(i + 2 * si, j) +
                             4.0 * at(i + 3 * si, j) - at(i + 4 * si, j);
    const double along_col = 4.0 * at(i, j + sj) - 6.0 * at(i, j + 2 * sj) +
                             4.0 * at(i, j + 3 * sj) - at(i, j + 4 * sj);
    at(i, j) = 0.5 * (along_row + along_col);
  }
}

PartialDerivs ExtendedField::derivatives_at(int i, int j) const {
  PartialDerivs d;
  const double h1 = h_[0];
  d.d1[0] = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h1);
  d.d2.xx = (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (h1 * h1);
  if (dim_ == 2) {
    const double h2 = h_[1];
    d.d1[1] = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h2);
    d.d2.yy = (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (h2 * h2);
    d.d2.xy = (at(i + 1, j + 1) - at(i - 1, j + 1) - at(i + 1, j - 1) + at(i - 1, j - 1)) /
              (4.0 * h1 * h2);
  }
  return d;
}

}  // namespace kgflow
