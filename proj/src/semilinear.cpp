// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/semilinear.hpp"

#include "qomega/eigensolve.hpp"
#include "qomega/linear_operator.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qomega {

namespace {

VectorXd positive_power(const VectorXd& v, double e) {
  VectorXd out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = v[i] > 0.0 ? std::pow(v[i], e) : 0.0;
  return out;
}

void check_exponent(double p, int dim) {
  require(std::isfinite(p) && p > 1.0 && p != 2.0, ErrorKind::invalid_parameter,
          "exponent must lie in (1, 2*) minus {2}");
  require(p < critical_exponent(dim), ErrorKind::invalid_parameter,
          "exponent must be below the critical exponent 2N/(N-2)");
}

}  // namespace

double constraint_integral(const Discretization& disc, const VectorXd& v, double p) {
  return disc.weight().dot(v.cwiseAbs().array().pow(p).matrix());
}

double quotient(const Discretization& disc, const VectorXd& v, double p) {
  const double g = constraint_integral(disc, v, p);
  require(g > 0.0, ErrorKind::invalid_parameter, "constraint integral must be positive");
  return v.dot(disc.apply_stiffness(v)) / std::pow(g, 2.0 / p);
}

VectorXd quotient_gradient(const Discretization& disc, const VectorXd& v, double p) {
  const double g = constraint_integral(disc, v, p);
  require(g > 0.0, ErrorKind::invalid_parameter, "constraint integral must be positive");
  const VectorXd av = disc.apply_stiffness(v);
  const double num = v.dot(av);
  VectorXd sv(v.size());
  for (Index i = 0; i < v.size(); ++i)
    sv[i] = v[i] == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(v[i]), p - 1.0), v[i]);
  return (2.0 / std::pow(g, 2.0 / p)) * (av - (num / g) * disc.weight().cwiseProduct(sv));
}

std::pair<VectorXd, double> interior_point(const Domain& domain) {
  return std::visit(
      [&](const auto& s) -> std::pair<VectorXd, double> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          return {s.center, s.radius};
        } else if constexpr (std::is_same_v<S, Annulus>) {
          VectorXd c = s.center;
          c[0] += 0.5 * (s.r_in + s.r_out);
          return {c, 0.5 * (s.r_out - s.r_in)};
        } else if constexpr (std::is_same_v<S, UnionOfBalls>) {
          return {s.balls.front().center, s.balls.front().radius};
        } else {
          return {s.center, s.half_widths.minCoeff()};
        }
      },
      domain.shape());
}

VectorXd bump(const Discretization& disc, const VectorXd& center, double radius) {
  require(radius > 0.0, ErrorKind::invalid_parameter, "bump radius must be positive");
  VectorXd out(disc.size());
  const double inv = 1.0 / (radius * radius);
  if (disc.is_radial()) {
    const auto& g = disc.radial_grid();
    const double c = center.norm();
    for (Index j = 0; j < g.m; ++j) {
      const double d = g.radius(j) - c;
      const double t = std::max(0.0, 1.0 - d * d * inv);
      out[j] = t * t;
    }
    return out;
  }
  const auto& g = disc.box_grid();
  const Vector3d c = center.head<3>();
  for (Index i = 0; i < g.size(); ++i) {
    const double t = std::max(0.0, 1.0 - (g.node(i) - c).squaredNorm() * inv);
    out[i] = t * t;
  }
  return out;
}

GroundState minimize_alpha(const Discretization& disc, double p, const MinimizeOptions& options) {
  check_exponent(p, disc.dim());
  const VectorXd& d = disc.weight();
  CounterRng rng(options.seed, 3);
  GroundState state;
  state.p = p;

  VectorXd v;
  double g = 0.0;
  for (int attempt = 0;; ++attempt) {
    require(attempt <= 3, ErrorKind::convergence,
            "no admissible start after three bump restarts");
    if (attempt == 0 && options.init) {
      v = options.init->cwiseMax(0.0);
    } else {
      auto [c, rho] = interior_point(disc.domain());
      if (attempt > 0) {
        VectorXd shift = rng.normal_vector(c.size());
        c += 0.5 * rho * rng.uniform() * shift.normalized();
        rho *= 0.4;
      } else {
        rho *= 0.8;
      }
      v = bump(disc, c, rho);
    }
    g = constraint_integral(disc, v, p);
    if (g > 0.0 && std::isfinite(g)) break;
    state.restarts = attempt + 1;
  }
  v /= std::pow(g, 1.0 / p);

  VectorXd av = disc.apply_stiffness(v);
  double r = v.dot(av);
  auto gradient = [&](const VectorXd& x, const VectorXd& ax, double rx) {
    return VectorXd(2.0 * (ax - rx * d.cwiseProduct(positive_power(x, p - 1.0))));
  };
  VectorXd grad = gradient(v, av, r);
  VectorXd tg;
  disc.precondition(grad, tg);
  double tau = 0.5;
  double max_err = 0.0;
  if (options.history) options.history->push_back(r);

  int it = 0;
  for (; it < options.max_iter; ++it) {
    double t = tau;
    bool full = true, accepted = false;
    VectorXd w, aw;
    double rw = 0.0;
    for (int halving = 0; halving < 60; ++halving) {
      w = (v - t * tg).cwiseMax(0.0);
      const double gw = constraint_integral(disc, w, p);
      if (gw > 0.0 && std::isfinite(gw)) {
        w /= std::pow(gw, 1.0 / p);
        aw = disc.apply_stiffness(w);
        rw = w.dot(aw);
        if (rw <= r) {
          accepted = true;
          break;
        }
      }
      t *= 0.5;
      full = false;
    }
    if (!accepted) break;
    max_err = std::max(max_err, std::abs(constraint_integral(disc, w, p) - 1.0));
    const double decrease = (r - rw) / r;
    const VectorXd grad_w = gradient(w, aw, rw);
    VectorXd tg_w;
    disc.precondition(grad_w, tg_w);
    const VectorXd s = w - v;
    const VectorXd y = grad_w - grad;
    const double yty = y.dot(tg_w - tg);
    tau = s.dot(y) / yty;
    if (!(tau > 0.0) || !std::isfinite(tau)) tau = 0.5;
    tau = std::min(tau, 1e3);
    v = std::move(w);
    av = std::move(aw);
    r = rw;
    grad = grad_w;
    tg = std::move(tg_w);
    if (options.history) options.history->push_back(r);
    if (full && decrease < options.rel_decrease_tol) {
      ++it;
      break;
    }
  }
  if (options.max_constraint_error) *options.max_constraint_error = max_err;
  state.iterations = it;
  state.alpha = r;
  state.log_amp = std::log(r) / (p - 2.0);
  const VectorXd f = av - r * d.cwiseProduct(positive_power(v, p - 1.0));
  state.residual = f.norm() / av.norm();
  state.v = ScalarField(disc.grid(), std::move(v));
  return state;
}

VectorXd linearized_potential(const Discretization& disc, double p, double log_amp,
                              const VectorXd& v) {
  require(v.size() == disc.size(), ErrorKind::invalid_parameter, "field size mismatch");
  const VectorXd& d = disc.weight();
  VectorXd out(v.size());
  for (Index i = 0; i < v.size(); ++i)
    out[i] = v[i] > 0.0 ? (p - 1.0) * d[i] * std::exp((p - 2.0) * (log_amp + std::log(v[i]))) : 0.0;
  return out;
}

namespace {

struct JacobianSolver {
  const Discretization& disc;
  VectorXd potential;
  Eigen::SparseLU<SparseMatrix> lu;
  bool direct = false;

  JacobianSolver(const Discretization& dz, VectorXd pot) : disc(dz), potential(std::move(pot)) {
    if (disc.has_exact_inverse()) {
      SparseMatrix j = disc.stiffness_matrix();
      for (Index i = 0; i < j.rows(); ++i) j.coeffRef(i, i) -= potential[i];
      lu.compute(j);
      require(lu.info() == Eigen::Success, ErrorKind::singular_jacobian,
              "Newton Jacobian is singular");
      direct = true;
    }
  }

  VectorXd solve(const VectorXd& b, double tol) const {
    if (direct) return lu.solve(b);
    const LinearOperator op(disc.size(), [this](const VectorXd& x, VectorXd& y) {
      disc.apply_stiffness(x, y);
      y -= potential.cwiseProduct(x);
    });
    const auto res = solve_minres(
        op, [this](const VectorXd& r, VectorXd& z) { disc.precondition(r, z); }, b, tol, 2000);
    require(std::isfinite(res.error), ErrorKind::singular_jacobian, "Newton Jacobian is singular");
    return res.x;
  }
};

}  // namespace

GroundState newton_refine(const Discretization& disc, const GroundState& state,
                          const NewtonOptions& options) {
  const double p = state.p;
  require(p > 2.0, ErrorKind::invalid_parameter, "Newton refinement needs p > 2");
  require(state.v.size() == disc.size(), ErrorKind::invalid_parameter, "state does not match grid");
  require(state.v.values.maxCoeff() > 0.0, ErrorKind::invalid_parameter,
          "Newton refinement needs a nonzero state");
  const VectorXd& d = disc.weight();
  const double alpha0 = state.alpha;
  const double la0 = std::log(alpha0) / (p - 2.0);

  VectorXd w = state.v.values.cwiseMax(0.0);
  auto residual_of = [&](const VectorXd& x, VectorXd& f) {
    const VectorXd ax = disc.apply_stiffness(x);
    f = ax - alpha0 * d.cwiseProduct(positive_power(x, p - 1.0));
    return f.norm() / ax.norm();
  };
  VectorXd f;
  double res = residual_of(w, f);
  GroundState out = state;
  out.newton_history = {res};
  int it = 0;
  for (; it < options.max_iter && res > options.tol; ++it) {
    const JacobianSolver jac(disc, linearized_potential(disc, p, la0, w));
    const double eta = std::max(options.linear_tol, std::min(1e-4, 1e-2 * res));
    const VectorXd delta = jac.solve(-f, eta);
    double t = 1.0;
    bool accepted = false;
    VectorXd f_t;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      const VectorXd trial = w + t * delta;
      const double r_t = residual_of(trial, f_t);
      if (r_t < res) {
        w = trial;
        f = f_t;
        res = r_t;
        accepted = true;
        break;
      }
    }
    out.newton_history.push_back(res);
    if (!accepted) {
      if (res <= 1e2 * options.tol) break;
      fail(ErrorKind::line_search, "Newton residual did not decrease after " +
                                       std::to_string(options.max_halvings) + " halvings");
    }
  }
  w = w.cwiseMax(0.0);
  const double g = constraint_integral(disc, w, p);
  require(g > 0.0, ErrorKind::convergence, "Newton iterate left the admissible set");
  out.alpha = alpha0 * std::pow(g, (p - 2.0) / p);
  out.log_amp = std::log(out.alpha) / (p - 2.0);
  out.v = ScalarField(disc.grid(), w / std::pow(g, 1.0 / p));
  out.residual = residual_of(w, f);
  out.newton_iterations = it;
  return out;
}

SupNorm sup_norm_scaling(const GroundState& state) {
  SupNorm s;
  const double vmax = state.v.values.maxCoeff();
  require(vmax > 0.0, ErrorKind::invalid_parameter, "state has no positive values");
  s.log_m = state.log_amp + std::log(vmax);
  if (std::abs(s.log_m) < 500.0) s.value = std::exp(s.log_m);
  s.m_pow = std::exp((state.p - 2.0) * s.log_m);
  return s;
}

std::optional<VectorXd> materialize(const GroundState& state) {
  if (!(std::abs(state.log_amp) < 500.0)) return std::nullopt;
  return VectorXd(std::exp(state.log_amp) * state.v.values);
}

GroundState radial_ground_state(const Domain& domain, double p, int m, double r_max,
                                const NewtonOptions& options) {
  require(domain.is_centered_radial(), ErrorKind::invalid_parameter,
          "radial ground states need a centered ball or annulus");
  const Discretization disc =
      Discretization::radial(build_radial_grid(domain.dim(), r_max, m), domain);
  const RadialGrid& grid = disc.radial_grid();
  const double r_seed = std::min(r_max, domain.circumscribing_radius() + 12.0);
  const int m_seed = std::max(8, static_cast<int>(std::lround(m * r_seed / r_max)));
  const RadialGrid seed_grid = build_radial_grid(domain.dim(), r_seed, m_seed);
  const EigenBasis eig = solve_pencil(Discretization::radial(seed_grid, domain), 1, 1e-12);
  MinimizeOptions mo;
  mo.init = VectorXd::Zero(m);
  for (Index j = 0; j < m; ++j) {
    const double r = grid.radius(j);
    if (r <= r_seed) (*mo.init)[j] = interpolate_radial(seed_grid, eig[0].phi.values, r);
  }
  const GroundState g = minimize_alpha(disc, p, mo);
  return p > 2.0 ? newton_refine(disc, g, options) : g;
}

double sobolev_constant(int dim) {
  const double n = dim;
  return std::numbers::pi * n * (n - 2.0) *
         std::pow(std::tgamma(0.5 * n) / std::tgamma(n), 2.0 / n);
}

AlphaBounds alpha_bounds(const Discretization& disc, double p) {
  check_exponent(p, disc.dim());
  const int dim = disc.dim();
  const double crit = critical_exponent(dim);
  AlphaBounds b;
  b.a0 = sobolev_constant(dim) * std::pow(volume(disc.domain()), -2.0 * (crit - p) / (crit * p));
  const auto [c, rho] = interior_point(disc.domain());
  b.a1 = quotient(disc, bump(disc, c, 0.8 * rho), p);
  return b;
}

AlphaBounds alpha_bounds(const Discretization& disc, const std::vector<double>& p_list) {
  require(!p_list.empty(), ErrorKind::invalid_parameter, "empty exponent list");
  AlphaBounds out{std::numeric_limits<double>::infinity(), 0.0};
  for (double p : p_list) {
    const AlphaBounds b = alpha_bounds(disc, p);
    out.a0 = std::min(out.a0, b.a0);
    out.a1 = std::max(out.a1, b.a1);
  }
  return out;
}

}  // namespace qomega
