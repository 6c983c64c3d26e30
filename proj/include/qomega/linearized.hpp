// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef QOMEGA_LINEARIZED_HPP
#define QOMEGA_LINEARIZED_HPP

#include "qomega/semilinear.hpp"

namespace qomega {

/// L = A - diag(V): the stiffness minus a diagonal potential. At a ground
/// state V is the Newton potential, so L is the Newton Jacobian.
class LinearizedOperator {
 public:
  LinearizedOperator(const Discretization& disc, VectorXd potential);

  const Discretization& discretization() const { return *disc_; }
  const VectorXd& potential() const { return potential_; }
  Index size() const { return potential_.size(); }

  void apply(const VectorXd& x, VectorXd& y) const;
  SparseMatrix matrix() const;

 private:
  const Discretization* disc_;
  VectorXd potential_;
};

/// The linearization at u = exp(log_amp) v of the equation A u = D u_+^{p-1}.
LinearizedOperator assemble_linearized(const Discretization& disc, const GroundState& state);

/// Eigenvalues of L h = lambda A h closest to zero. The A-normalization
/// measures h in the energy norm, so lambda = 1 - nu with nu the eigenvalues
/// of the potential relative to the stiffness.
struct SpectralWindow {
  double center = 0.0;
  /// Sorted by absolute value.
  VectorXd eigenvalues;
  VectorXd residuals;
  double min_abs = 0.0;
  int approx_kernel_dim = 0;
  /// Negative eigenvalues among those computed.
  int negative_count = 0;
  double kernel_tol = 0.0;
};

constexpr double kDefaultKernelTol = 1e-6;

SpectralWindow spectrum_near_zero(const LinearizedOperator& lu, int count = 4,
                                  double kernel_tol = kDefaultKernelTol, double tol = 1e-10);

/// Dense reference for small problems: L h = lambda A h with A SPD.
SpectralWindow spectrum_near_zero(const SparseMatrix& lu, const SparseMatrix& a, int count,
                                  double kernel_tol = kDefaultKernelTol);

}  // namespace qomega

#endif  // QOMEGA_LINEARIZED_HPP
