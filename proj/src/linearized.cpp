// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/linearized.hpp"

#include "qomega/krylov.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <vector>

namespace qomega {

LinearizedOperator::LinearizedOperator(const Discretization& disc, VectorXd potential)
    : disc_(&disc), potential_(std::move(potential)) {
  require(potential_.size() == disc.size(), ErrorKind::invalid_parameter,
          "potential size mismatch");
}

void LinearizedOperator::apply(const VectorXd& x, VectorXd& y) const {
  disc_->apply_stiffness(x, y);
  y -= potential_.cwiseProduct(x);
}

SparseMatrix LinearizedOperator::matrix() const {
  SparseMatrix m = disc_->stiffness_matrix();
  for (Index i = 0; i < m.rows(); ++i) m.coeffRef(i, i) -= potential_[i];
  return m;
}

LinearizedOperator assemble_linearized(const Discretization& disc, const GroundState& state) {
  require(state.p > 2.0, ErrorKind::unsupported_model,
          "the linearized problem is set up for p > 2");
  return LinearizedOperator(disc, linearized_potential(disc, state.p, state.log_amp, state.v.values));
}

namespace {

SpectralWindow make_window(const VectorXd& lambda, const VectorXd& residuals, double kernel_tol) {
  std::vector<Index> order(static_cast<std::size_t>(lambda.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(lambda[a]) < std::abs(lambda[b]); });
  SpectralWindow w;
  w.kernel_tol = kernel_tol;
  w.eigenvalues.resize(lambda.size());
  w.residuals.resize(lambda.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    w.eigenvalues[static_cast<Index>(i)] = lambda[order[i]];
    w.residuals[static_cast<Index>(i)] = residuals[order[i]];
  }
  w.min_abs = lambda.size() ? std::abs(w.eigenvalues[0]) : 0.0;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda[i]) < kernel_tol) ++w.approx_kernel_dim;
    if (lambda[i] < -kernel_tol) ++w.negative_count;
  }
  return w;
}

}  // namespace

SpectralWindow spectrum_near_zero(const LinearizedOperator& lu, int count, double kernel_tol,
                                  double tol) {
  require(count >= 1, ErrorKind::invalid_parameter, "count must be positive");
  require(kernel_tol > 0.0, ErrorKind::invalid_parameter, "kernel tolerance must be positive");
  const Discretization& disc = lu.discretization();
  const VectorXd& v = lu.potential();
  const Index n = disc.size();
  if (v.isZero(0.0)) {
    const Index k = std::min<Index>(count, n);
    return make_window(VectorXd::Ones(k), VectorXd::Zero(k), kernel_tol);
  }
  const ApplyFn apply_a = [&disc](const VectorXd& x, VectorXd& y) { disc.apply_stiffness(x, y); };
  const ApplyFn precond = [&disc](const VectorXd& x, VectorXd& y) { disc.precondition(x, y); };
  PencilEigs res;
  VectorXd nu;
  if (disc.has_exact_inverse()) {
    const ApplyFn apply_b = [&v](const VectorXd& x, VectorXd& y) { y = v.cwiseProduct(x); };
    res = lanczos_largest(n, apply_b, apply_a, precond, count, tol);
    nu = res.values;
  } else {
    const ApplyFn apply_k = [&v](const VectorXd& x, VectorXd& y) { y = -v.cwiseProduct(x); };
    res = lobpcg_smallest(n, apply_k, apply_a, precond, count, tol);
    nu = -res.values;
  }
  require(res.converged, ErrorKind::convergence, "linearized spectrum did not converge");
  const VectorXd lambda = (1.0 - nu.array()).matrix();
  VectorXd residuals(lambda.size());
  VectorXd lh, ah;
  for (Index i = 0; i < lambda.size(); ++i) {
    const VectorXd h = res.vectors.col(i);
    lu.apply(h, lh);
    disc.apply_stiffness(h, ah);
    residuals[i] = (lh - lambda[i] * ah).norm() / ah.norm();
  }
  return make_window(lambda, residuals, kernel_tol);
}

SpectralWindow spectrum_near_zero(const SparseMatrix& lu, const SparseMatrix& a, int count,
                                  double kernel_tol) {
  require(lu.rows() == a.rows() && lu.cols() == a.cols(), ErrorKind::invalid_parameter,
          "operator size mismatch");
  const MatrixXd l = MatrixXd(lu);
  const MatrixXd m = MatrixXd(a);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(l, m);
  require(es.info() == Eigen::Success, ErrorKind::convergence, "dense eigensolver failed");
  const VectorXd& all = es.eigenvalues();
  std::vector<Index> order(static_cast<std::size_t>(all.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return std::abs(all[x]) < std::abs(all[y]); });
  const Index k = std::min<Index>(count, all.size());
  VectorXd lambda(k), residuals(k);
  for (Index i = 0; i < k; ++i) {
    const Index j = order[static_cast<std::size_t>(i)];
    lambda[i] = all[j];
    const VectorXd h = es.eigenvectors().col(j);
    residuals[i] = (l * h - all[j] * (m * h)).norm() / (m * h).norm();
  }
  return make_window(lambda, residuals, kernel_tol);
}

}  // namespace qomega
