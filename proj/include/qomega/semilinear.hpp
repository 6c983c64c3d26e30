// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef QOMEGA_SEMILINEAR_HPP
#define QOMEGA_SEMILINEAR_HPP

#include "qomega/discretize.hpp"

#include <optional>
#include <vector>

namespace qomega {

/// Minimizer v_p of the constrained quotient with alpha_p = |v_p|^2 and the
/// solution u_p = exp(log_amp) v_p, log_amp = ln(alpha_p) / (p - 2).
struct GroundState {
  double p = 0.0;
  double alpha = 0.0;
  ScalarField v;
  double log_amp = 0.0;
  /// |A u - D u_+^{p-1}| / |A u|, evaluated in scaled form.
  double residual = 0.0;
  int iterations = 0;
  int newton_iterations = 0;
  int restarts = 0;
  /// Newton residual history (empty before refinement).
  std::vector<double> newton_history;
};

/// sum_i D_i |v_i|^p
double constraint_integral(const Discretization& disc, const VectorXd& v, double p);

/// v^T A v / (sum_i D_i |v_i|^p)^{2/p}; requires a positive denominator.
double quotient(const Discretization& disc, const VectorXd& v, double p);

/// Gradient of `quotient` with respect to the nodal values.
VectorXd quotient_gradient(const Discretization& disc, const VectorXd& v, double p);

/// Nonnegative bump max(0, 1 - |x - c|^2 / rho^2)^2 on the grid; radial
/// grids measure the distance as | |x| - |c| |.
VectorXd bump(const Discretization& disc, const VectorXd& center, double radius);

/// A point of the domain well inside it, with the distance to the boundary.
std::pair<VectorXd, double> interior_point(const Domain& domain);

struct MinimizeOptions {
  double rel_decrease_tol = 1e-12;
  int max_iter = 20000;
  std::uint64_t seed = 1;
  /// Initial guess; a bump at an interior point when empty.
  std::optional<VectorXd> init;
  /// Quotient value after every accepted step.
  std::vector<double>* history = nullptr;
  /// Largest constraint violation observed after accepted steps.
  double* max_constraint_error = nullptr;
};

/// Preconditioned gradient descent on the quotient with Barzilai-Borwein
/// steps, clamping to v >= 0 and rescaling onto sum D |v|^p = 1.
GroundState minimize_alpha(const Discretization& disc, double p, const MinimizeOptions& options = {});

/// (p - 1) D_i exp((p - 2)(log_amp + ln v_i)) on v_i > 0 and 0 elsewhere:
/// the potential of the linearization A - diag(.) at u = exp(log_amp) v.
VectorXd linearized_potential(const Discretization& disc, double p, double log_amp,
                              const VectorXd& v);

struct NewtonOptions {
  double tol = 1e-11;
  int max_iter = 60;
  int max_halvings = 5;
  /// Relative accuracy of iterative inner solves.
  double linear_tol = 1e-12;
};

/// Damped Newton on A u = D u_+^{p-1}, iterated in the scaled unknown
/// w = u / alpha^{1/(p-2)} so that no huge or tiny numbers appear.
GroundState newton_refine(const Discretization& disc, const GroundState& state,
                          const NewtonOptions& options = {});

/// |u|_inf in log form; `value` only when it is representable.
struct SupNorm {
  double log_m = 0.0;
  std::optional<double> value;
  /// |u|_inf^{p-2}
  double m_pow = 0.0;
};

SupNorm sup_norm_scaling(const GroundState& state);

/// u_p = exp(log_amp) v_p, or nothing when |log_amp| >= 500.
std::optional<VectorXd> materialize(const GroundState& state);

/// Radial least energy solution on a centered ball: 1D descent followed by
/// Newton on the finite-volume radial grid.
GroundState radial_ground_state(const Domain& domain, double p, int m, double r_max,
                                const NewtonOptions& options = {});

/// Lower and upper bounds on alpha_p: a0 from Hoelder plus the sharp Sobolev
/// constant, a1 from the quotient of a fixed interior bump.
struct AlphaBounds {
  double a0 = 0.0;
  double a1 = 0.0;
};

/// Sharp Sobolev constant pi N (N - 2) (Gamma(N/2) / Gamma(N))^{2/N}.
double sobolev_constant(int dim);

AlphaBounds alpha_bounds(const Discretization& disc, double p);

/// Uniform bounds over p in the list.
AlphaBounds alpha_bounds(const Discretization& disc, const std::vector<double>& p_list);

}  // namespace qomega

#endif  // QOMEGA_SEMILINEAR_HPP
