// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef QOMEGA_KRYLOV_HPP
#define QOMEGA_KRYLOV_HPP

#include "qomega/linear_operator.hpp"

namespace qomega {

/// Eigenvalues and vectors of a symmetric pencil, sorted as requested by the
/// solver that produced them.
struct PencilEigs {
  VectorXd values;
  MatrixXd vectors;
  VectorXd residuals;
  int iterations = 0;
  bool converged = false;
};

struct LanczosOptions {
  int basis_size = 0;  ///< 0 picks max(2k + 24, 48)
  int max_restarts = 400;
  std::uint64_t seed = 1;
};

/// Largest eigenvalues mu of B x = mu A x with A symmetric positive definite,
/// through Lanczos on A^{-1} B in the A-inner product: full
/// reorthogonalization, thick restarts that keep the wanted Ritz vectors.
/// Vectors come back A-orthonormal. `solve_a` must be an exact inverse.
PencilEigs lanczos_largest(Index n, const ApplyFn& apply_b, const ApplyFn& apply_a,
                           const ApplyFn& solve_a, int k, double tol,
                           const LanczosOptions& options = {}, const MatrixXd* start = nullptr);

struct LobpcgOptions {
  int max_iter = 2000;
  std::uint64_t seed = 1;
};

/// Smallest eigenvalues lambda of K x = lambda M x with M symmetric positive
/// definite, by block LOBPCG with soft locking and an SPD preconditioner T.
/// Vectors come back M-orthonormal. Convergence is
/// |K x - lambda M x| <= tol (|K x| + |lambda| |M x|).
PencilEigs lobpcg_smallest(Index n, const ApplyFn& apply_k, const ApplyFn& apply_m,
                           const ApplyFn& precond, int k, double tol,
                           const LobpcgOptions& options = {}, const MatrixXd* start = nullptr);

/// Columns of `x` made orthonormal in the inner product of `apply_m` after
/// projecting out the M-orthonormal `basis`; nearly dependent columns are
/// dropped.
MatrixXd orthonormalize(const ApplyFn& apply_m, const MatrixXd& basis, const MatrixXd& m_basis,
                        MatrixXd x, MatrixXd* m_x = nullptr);

}  // namespace qomega

#endif  // QOMEGA_KRYLOV_HPP
