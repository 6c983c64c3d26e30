// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/linear_operator.hpp"

namespace qomega {

IterativeResult solve_cg(const LinearOperator& op, const ApplyFn& precond, const VectorXd& b,
                         double tol, int max_iter, const VectorXd* guess) {
  Eigen::ConjugateGradient<LinearOperator, Eigen::Lower | Eigen::Upper, FunctionPreconditioner> cg;
  cg.preconditioner().set(precond);
  cg.setTolerance(tol);
  cg.setMaxIterations(max_iter);
  cg.compute(op);
  IterativeResult out;
  if (guess) {
    out.x = cg.solveWithGuess(b, *guess);
  } else {
    out.x = cg.solve(b);
  }
  out.iterations = static_cast<int>(cg.iterations());
  out.error = cg.error();
  out.converged = cg.info() == Eigen::Success;
  return out;
}

IterativeResult solve_minres(const LinearOperator& op, const ApplyFn& precond, const VectorXd& b,
                             double tol, int max_iter) {
  Eigen::MINRES<LinearOperator, Eigen::Lower | Eigen::Upper, FunctionPreconditioner> minres;
  minres.preconditioner().set(precond);
  minres.setTolerance(tol);
  minres.setMaxIterations(max_iter);
  minres.compute(op);
  IterativeResult out;
  out.x = minres.solve(b);
  out.iterations = static_cast<int>(minres.iterations());
  out.error = minres.error();
  out.converged = minres.info() == Eigen::Success;
  return out;
}

}  // namespace qomega
