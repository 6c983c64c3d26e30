// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef QOMEGA_MULTIGRID_HPP
#define QOMEGA_MULTIGRID_HPP

#include "qomega/grid.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <memory>
#include <vector>

namespace qomega {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// y = A x for the box stiffness A = h (6 I - adjacency), which is the
/// 7-point Laplacian scaled so that x^T A x approximates the Dirichlet
/// integral. Dirichlet data on the box faces.
void apply_box_stiffness(const Eigen::Array3i& n, double h, const VectorXd& x, VectorXd& y);

SparseMatrix assemble_box_stiffness(const Eigen::Array3i& n, double h);

/// Geometric multigrid for the box stiffness: red-black Gauss-Seidel,
/// restriction by the transpose of trilinear prolongation, rediscretized
/// coarse operators, sparse Cholesky on the coarsest level. One V-cycle from
/// a zero guess is a symmetric positive definite approximation of A^{-1}.
class BoxMultigrid {
 public:
  explicit BoxMultigrid(const BoxGrid& grid, int smoothing_steps = 2);

  /// z = V(r), one cycle from zero.
  void apply(const VectorXd& r, VectorXd& z) const;

  /// In-place V-cycle on A x = b.
  void vcycle(const VectorXd& b, VectorXd& x) const;

  int levels() const { return static_cast<int>(levels_.size()); }
  const Eigen::Array3i& coarsest_shape() const { return levels_.back().n; }

 private:
  struct Level {
    Eigen::Array3i n;
    double h;
    Index size() const { return Index(n[0]) * n[1] * n[2]; }
  };

  void cycle(std::size_t level, const VectorXd& b, VectorXd& x) const;

  std::vector<Level> levels_;
  int smoothing_steps_;
  std::shared_ptr<Eigen::SimplicialLLT<SparseMatrix>> coarse_;
};

}  // namespace qomega

#endif  // QOMEGA_MULTIGRID_HPP
