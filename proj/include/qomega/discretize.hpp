// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef QOMEGA_DISCRETIZE_HPP
#define QOMEGA_DISCRETIZE_HPP

#include "qomega/geometry.hpp"
#include "qomega/grid.hpp"
#include "qomega/multigrid.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace qomega {

/// Symmetric stiffness with u^T A u ~ \int |grad u|^2. Box grids: 7-point
/// stencil times h. Radial grids: finite-volume 3-point stencil with face
/// weights |S^{N-1}| r^{N-1} / delta.
SparseMatrix assemble_stiffness(const Grid& grid);

/// Quadrature weights w_i: h^3 for box cells, exact shell volumes for radial
/// cells.
VectorXd assemble_mass(const Grid& grid);

/// Signed volume fraction q_i in [-1, 1] of Q over each cell. Box cells cut by
/// the boundary are averaged over 4^3 midpoint subcells; radial shells use
/// the exact measure.
VectorXd assemble_weight_fraction(const Grid& grid, const Domain& domain);

/// Diagonal of the weight form: D_ii = q_i w_i, so u^T D v ~ \int Q u v.
VectorXd assemble_weight(const Grid& grid, const Domain& domain);

/// Grid, domain and the discrete forms of one problem. Heavy parts (the
/// factorization or the multigrid hierarchy) are shared between copies and
/// immutable, so a Discretization can be read from many threads.
class Discretization {
 public:
  /// Box problems up to this many nodes also keep an assembled matrix and a
  /// sparse Cholesky factor.
  static constexpr Index kDirectLimit = 16000;

  static Discretization box(const BoxGrid& grid, const Domain& domain);
  static Discretization radial(const RadialGrid& grid, const Domain& domain);
  static Discretization make(const Grid& grid, const Domain& domain);

  /// Same grid and stiffness with a different weight diagonal.
  Discretization with_weight(VectorXd weight) const;

  const Grid& grid() const { return grid_; }
  const Domain& domain() const { return domain_; }
  Index size() const { return weight_.size(); }
  int dim() const { return grid_dim(grid_); }
  bool is_radial() const { return std::holds_alternative<RadialGrid>(grid_); }
  const BoxGrid& box_grid() const { return std::get<BoxGrid>(grid_); }
  const RadialGrid& radial_grid() const { return std::get<RadialGrid>(grid_); }

  const VectorXd& weight() const { return weight_; }
  const VectorXd& mass() const { return mass_; }

  void apply_stiffness(const VectorXd& x, VectorXd& y) const;
  VectorXd apply_stiffness(const VectorXd& x) const;

  /// Symmetric positive definite approximation of A^{-1}: exact for radial
  /// and small box problems, one multigrid V-cycle otherwise.
  void precondition(const VectorXd& r, VectorXd& z) const;
  bool has_exact_inverse() const;

  /// A x = b to relative residual `tol` (direct, or multigrid-preconditioned CG).
  VectorXd solve_stiffness(const VectorXd& b, double tol = 1e-12) const;

  SparseMatrix stiffness_matrix() const;

  /// Node nearest to a point (radial: nearest radius).
  Index nearest_node(const VectorXd& x) const;

 private:
  struct Core;

  Grid grid_;
  Domain domain_;
  VectorXd weight_;
  VectorXd mass_;
  std::shared_ptr<const Core> core_;
};

/// Matching signed weight on a sign mask of a field: nodes where
/// `keep(i)` is false get q = -1, the rest keep their fraction.
VectorXd masked_weight(const Discretization& disc, const std::function<bool(Index)>& keep);

/// \oint_{\partial\Omega} F(f) (zeta . nu) dzeta over sphere-bounded domains,
/// with F applied pointwise to the interpolated field. Box fields use
/// trilinear interpolation on a Gauss-Legendre x uniform-azimuth rule.
double surface_quadrature(const Domain& domain, const ScalarField& field,
                          const std::function<double(double)>& integrand = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<VectorXd, VectorXd> gauss_legendre(int n);

}  // namespace qomega

#endif  // QOMEGA_DISCRETIZE_HPP
