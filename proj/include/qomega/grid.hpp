// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef QOMEGA_GRID_HPP
#define QOMEGA_GRID_HPP

#include "qomega/common.hpp"

#include <iosfwd>
#include <string>
#include <variant>

namespace qomega {

/// Uniform tensor grid of interior nodes of the box center + [-L_a, L_a]
/// (a = x, y, z) with a common spacing h. Homogeneous Dirichlet data sit on
/// the box faces, so L_a = (n_a + 1) h / 2.
struct BoxGrid {
  Vector3d center = Vector3d::Zero();
  Eigen::Array3i n = Eigen::Array3i::Constant(8);
  double h = 0.0;

  Index size() const { return Index(n[0]) * n[1] * n[2]; }
  Vector3d half_widths() const { return 0.5 * h * (n.cast<double>() + 1.0).matrix(); }

  Index index(int i, int j, int k) const { return i + Index(n[0]) * (j + Index(n[1]) * k); }

  Eigen::Array3i coords(Index idx) const {
    const int i = static_cast<int>(idx % n[0]);
    const Index rest = idx / n[0];
    return {i, static_cast<int>(rest % n[1]), static_cast<int>(rest / n[1])};
  }

  double coordinate(int axis, int i) const {
    return center[axis] - half_widths()[axis] + (i + 1) * h;
  }

  Vector3d node(int i, int j, int k) const {
    const Vector3d lo = center - half_widths();
    return lo + h * Vector3d(i + 1, j + 1, k + 1);
  }

  Vector3d node(Index idx) const {
    const auto c = coords(idx);
    return node(c[0], c[1], c[2]);
  }
};

/// Vertex-centered radial grid r_j = j * delta, j = 0..m-1, with Dirichlet
/// data at r_max = m * delta and the regularity condition u'(0) = 0.
struct RadialGrid {
  int dim = 3;
  double r_max = 1.0;
  int m = 8;

  double delta() const { return r_max / m; }
  Index size() const { return m; }
  double radius(Index j) const { return static_cast<double>(j) * delta(); }
};

using Grid = std::variant<BoxGrid, RadialGrid>;

/// Cube [-L, L]^3 with n interior nodes per axis, h = 2L/(n+1).
BoxGrid build_box_grid(double half_width, int n);

/// Box center + [-L_a, L_a] with spacing close to `h`; each half-width is
/// rounded so that (n_a + 1) is a multiple of `align` (helps multigrid).
BoxGrid build_box_grid(const Vector3d& half_widths, double h, const Vector3d& center = Vector3d::Zero(),
                       int align = 1);

RadialGrid build_radial_grid(int dim, double r_max, int m);

Index grid_size(const Grid& grid);
int grid_dim(const Grid& grid);

/// Distance from `center` of every node (radial grids ignore `center`).
VectorXd node_radii(const Grid& grid, const VectorXd& center);

/// A real value per grid node.
struct ScalarField {
  Grid grid;
  VectorXd values;

  ScalarField() = default;
  ScalarField(Grid g, VectorXd v);

  Index size() const { return values.size(); }
  double sup_norm() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

/// Trilinear interpolation of a box field (zero outside the box).
double interpolate_linear(const BoxGrid& grid, const VectorXd& values, const Vector3d& x);

/// Tensor-product cubic Lagrange interpolation; falls back to trilinear next
/// to the box faces.
double interpolate_cubic(const BoxGrid& grid, const VectorXd& values, const Vector3d& x);

/// Piecewise-linear interpolation of a radial field (zero beyond r_max).
double interpolate_radial(const RadialGrid& grid, const VectorXd& values, double r);

/// `x,y,z,value` or `r,value` rows, 17 significant digits.
void write_csv(std::ostream& os, const ScalarField& field);
void write_csv(const std::string& path, const ScalarField& field);

}  // namespace qomega

#endif  // QOMEGA_GRID_HPP
