// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef QOMEGA_LINEAR_OPERATOR_HPP
#define QOMEGA_LINEAR_OPERATOR_HPP

// Matrix-free operators and preconditioners usable by Eigen's iterative
// solvers (ConjugateGradient, MINRES).

#include "qomega/common.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <unsupported/Eigen/IterativeSolvers>

#include <functional>

namespace qomega {
class LinearOperator;
}

namespace Eigen::internal {
template <>
struct traits<qomega::LinearOperator> : public traits<SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace qomega {

using ApplyFn = std::function<void(const VectorXd&, VectorXd&)>;

class LinearOperator : public Eigen::EigenBase<LinearOperator> {
 public:
  using Scalar = double;
  using RealScalar = double;
  using StorageIndex = int;
  enum {
    ColsAtCompileTime = Eigen::Dynamic,
    MaxColsAtCompileTime = Eigen::Dynamic,
    IsRowMajor = false
  };

  LinearOperator() = default;
  LinearOperator(Index size, ApplyFn apply) : size_(size), apply_(std::move(apply)) {}

  Index rows() const { return size_; }
  Index cols() const { return size_; }

  void apply(const VectorXd& x, VectorXd& y) const { apply_(x, y); }

  template <typename Rhs>
  Eigen::Product<LinearOperator, Rhs, Eigen::AliasFreeProduct> operator*(
      const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<LinearOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

 private:
  Index size_ = 0;
  ApplyFn apply_;
};

/// Wraps a callable z = P r as an Eigen preconditioner.
class FunctionPreconditioner {
 public:
  FunctionPreconditioner() = default;
  template <typename M>
  explicit FunctionPreconditioner(const M&) {}

  template <typename M>
  FunctionPreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  FunctionPreconditioner& factorize(const M&) { return *this; }
  template <typename M>
  FunctionPreconditioner& compute(const M&) { return *this; }

  template <typename Rhs>
  VectorXd solve(const Rhs& b) const {
    VectorXd z;
    if (apply_) {
      apply_(VectorXd(b), z);
    } else {
      z = b;
    }
    return z;
  }

  Eigen::ComputationInfo info() const { return Eigen::Success; }

  void set(ApplyFn apply) { apply_ = std::move(apply); }

 private:
  ApplyFn apply_;
};

struct IterativeResult {
  VectorXd x;
  int iterations = 0;
  double error = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients (Eigen) on a symmetric positive
/// definite operator.
IterativeResult solve_cg(const LinearOperator& op, const ApplyFn& precond, const VectorXd& b,
                         double tol, int max_iter, const VectorXd* guess = nullptr);

/// Preconditioned MINRES (Eigen) on a symmetric, possibly indefinite
/// operator; the preconditioner must be SPD.
IterativeResult solve_minres(const LinearOperator& op, const ApplyFn& precond, const VectorXd& b,
                             double tol, int max_iter);

}  // namespace qomega

namespace Eigen::internal {

template <typename Rhs>
struct generic_product_impl<qomega::LinearOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<qomega::LinearOperator, Rhs,
                                generic_product_impl<qomega::LinearOperator, Rhs>> {
  using Scalar = typename Product<qomega::LinearOperator, Rhs>::Scalar;

  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const qomega::LinearOperator& lhs, const Rhs& rhs,
                            const Scalar& alpha) {
    const Eigen::VectorXd x = rhs;
    Eigen::VectorXd y;
    lhs.apply(x, y);
    dst.noalias() += alpha * y;
  }
};

}  // namespace Eigen::internal

#endif  // QOMEGA_LINEAR_OPERATOR_HPP
