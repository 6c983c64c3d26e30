// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qomega {

double EigenBasis::gram_a_offdiag() const {
  double m = 0.0;
  for (Index i = 0; i < gram_a.rows(); ++i)
    for (Index j = 0; j < gram_a.cols(); ++j)
      if (i != j)
        m = std::max(m, std::abs(gram_a(i, j)) / std::sqrt(pairs[i].lambda * pairs[j].lambda));
  return m;
}

double EigenBasis::gram_d_offdiag() const {
  double m = 0.0;
  for (Index i = 0; i < gram_d.rows(); ++i)
    for (Index j = 0; j < gram_d.cols(); ++j)
      if (i != j) m = std::max(m, std::abs(gram_d(i, j)));
  return m;
}

void fix_sign(const Discretization& disc, int k, VectorXd& phi) {
  if (phi.size() == 0) return;
  double ref = 0.0;
  if (k == 1) {
    ref = phi[disc.nearest_node(disc.domain().centroid())];
    if (ref == 0.0) ref = phi.sum();
  } else {
    const double floor = 1e-8 * phi.cwiseAbs().maxCoeff();
    for (Index i = 0; i < phi.size(); ++i)
      if (std::abs(phi[i]) > floor) {
        ref = phi[i];
        break;
      }
  }
  if (ref < 0.0) phi = -phi;
}

void finalize_basis(const Discretization& disc, EigenBasis& basis) {
  const std::size_t k = basis.pairs.size();
  MatrixXd phi(disc.size(), static_cast<Index>(k));
  for (std::size_t i = 0; i < k; ++i) phi.col(static_cast<Index>(i)) = basis.pairs[i].phi.values;
  MatrixXd aphi(disc.size(), static_cast<Index>(k));
  for (std::size_t i = 0; i < k; ++i)
    aphi.col(static_cast<Index>(i)) = disc.apply_stiffness(basis.pairs[i].phi.values);
  basis.gram_a = phi.transpose() * aphi;
  basis.gram_d = phi.transpose() * disc.weight().asDiagonal() * phi;
  basis.multiplicity.assign(k, 1);
  std::size_t start = 0;
  for (std::size_t i = 1; i <= k; ++i) {
    const bool split =
        i == k || std::abs(basis.pairs[i].lambda - basis.pairs[i - 1].lambda) >
                      1e-6 * std::abs(basis.pairs[i].lambda);
    if (split) {
      for (std::size_t j = start; j < i; ++j) basis.multiplicity[j] = static_cast<int>(i - start);
      start = i;
    }
  }
}

EigenBasis solve_pencil(const Discretization& disc, const PencilOptions& options) {
  require(options.k_max >= 1, ErrorKind::invalid_parameter, "k_max must be positive");
  require(options.tol > 0.0, ErrorKind::invalid_parameter, "tolerance must be positive");
  const Index n = disc.size();
  const VectorXd& d = disc.weight();
  const ApplyFn apply_a = [&disc](const VectorXd& x, VectorXd& y) { disc.apply_stiffness(x, y); };
  const ApplyFn precond = [&disc](const VectorXd& x, VectorXd& y) { disc.precondition(x, y); };

  PencilMethod method = options.method;
  if (method == PencilMethod::automatic)
    method = disc.has_exact_inverse() ? PencilMethod::lanczos : PencilMethod::lobpcg;
  require(method != PencilMethod::lanczos || disc.has_exact_inverse(), ErrorKind::invalid_parameter,
          "Lanczos needs an exact stiffness factorization");

  VectorXd mu;
  MatrixXd x;
  int iterations = 0;
  if (method == PencilMethod::lanczos) {
    const ApplyFn apply_b = [&d](const VectorXd& v, VectorXd& y) { y = d.cwiseProduct(v); };
    LanczosOptions lo;
    lo.seed = options.seed;
    lo.max_restarts = options.max_iter;
    auto res = lanczos_largest(n, apply_b, apply_a, precond, options.k_max, options.tol, lo,
                               options.start);
    require(res.converged, ErrorKind::convergence, "Lanczos did not converge");
    mu = res.values;
    x = res.vectors;
    iterations = res.iterations;
  } else {
    const ApplyFn apply_k = [&d](const VectorXd& v, VectorXd& y) { y = -d.cwiseProduct(v); };
    LobpcgOptions lo;
    lo.seed = options.seed;
    lo.max_iter = options.max_iter;
    auto res = lobpcg_smallest(n, apply_k, apply_a, precond, options.k_max, options.tol, lo,
                               options.start);
    require(res.converged, ErrorKind::convergence, "LOBPCG did not converge");
    mu = -res.values;
    x = res.vectors;
    iterations = res.iterations;
  }
  int positive = 0;
  while (positive < mu.size() && mu[positive] > 0.0) ++positive;
  require(positive == options.k_max, ErrorKind::partial_result,
          "found only " + std::to_string(positive) + " positive eigenvalues of " +
              std::to_string(options.k_max));

  EigenBasis basis;
  basis.iterations = iterations;
  for (int i = 0; i < options.k_max; ++i) {
    EigenPair p;
    p.k = i + 1;
    p.lambda = 1.0 / mu[i];
    VectorXd phi = x.col(i) / std::sqrt(mu[i]);
    fix_sign(disc, p.k, phi);
    const VectorXd aphi = disc.apply_stiffness(phi);
    const VectorXd dphi = d.cwiseProduct(phi);
    const double qa = phi.dot(aphi);
    p.rayleigh_residual = std::abs(qa - p.lambda * phi.dot(dphi)) / std::abs(qa);
    p.residual = (aphi - p.lambda * dphi).norm() / aphi.norm();
    p.phi = ScalarField(disc.grid(), std::move(phi));
    basis.pairs.push_back(std::move(p));
  }
  finalize_basis(disc, basis);
  return basis;
}

EigenBasis solve_pencil(const Discretization& disc, int k_max, double tol) {
  PencilOptions o;
  o.k_max = k_max;
  o.tol = tol;
  return solve_pencil(disc, o);
}

std::pair<VectorXd, MatrixXd> solve_pencil(const SparseMatrix& a, const VectorXd& d, int k_max,
                                           double tol) {
  require(a.rows() == a.cols() && a.rows() == d.size(), ErrorKind::invalid_parameter,
          "pencil size mismatch");
  Eigen::SimplicialLLT<SparseMatrix> llt(a);
  require(llt.info() == Eigen::Success, ErrorKind::assembly,
          "Cholesky factorization failed: stiffness not positive definite");
  const ApplyFn apply_a = [&a](const VectorXd& x, VectorXd& y) { y.noalias() = a * x; };
  const ApplyFn solve_a = [&llt](const VectorXd& x, VectorXd& y) { y = llt.solve(x); };
  const ApplyFn apply_b = [&d](const VectorXd& v, VectorXd& y) { y = d.cwiseProduct(v); };
  auto res = lanczos_largest(a.rows(), apply_b, apply_a, solve_a, k_max, tol);
  require(res.converged, ErrorKind::convergence, "Lanczos did not converge");
  int positive = 0;
  while (positive < res.values.size() && res.values[positive] > 0.0) ++positive;
  require(positive == k_max, ErrorKind::partial_result,
          "found only " + std::to_string(positive) + " positive eigenvalues of " +
              std::to_string(k_max));
  VectorXd lambda = res.values.cwiseInverse();
  MatrixXd phi = res.vectors * res.values.cwiseSqrt().cwiseInverse().asDiagonal();
  return {lambda, phi};
}

namespace {

struct Basis2 {
  double f1, f2, d1, d2;
};

// r^s Z_nu(k r) and derivatives for the two solutions of one layer type.
Basis2 bessel_pair(bool inside, double nu, double k, double s, double r) {
  const double x = k * r;
  const double rs = std::pow(r, s);
  const double rs1 = s * std::pow(r, s - 1.0);
  double z1, z2, z1p, z2p;
  if (inside) {
    z1 = std::cyl_bessel_j(nu, x);
    z2 = std::cyl_neumann(nu, x);
    z1p = -std::cyl_bessel_j(nu + 1.0, x) + nu / x * z1;
    z2p = -std::cyl_neumann(nu + 1.0, x) + nu / x * z2;
  } else {
    z1 = std::cyl_bessel_i(nu, x);
    z2 = std::cyl_bessel_k(nu, x);
    z1p = std::cyl_bessel_i(nu + 1.0, x) + nu / x * z1;
    z2p = -std::cyl_bessel_k(nu + 1.0, x) + nu / x * z2;
  }
  return {rs * z1, rs * z2, rs1 * z1 + rs * k * z1p, rs1 * z2 + rs * k * z2p};
}

constexpr double kSmallR = 1e-8;

}  // namespace

BesselProfile::BesselProfile(const Domain& domain, int ell, double lambda)
    : dim_(domain.dim()), ell_(ell), lambda_(lambda) {
  require(domain.is_centered_radial(), ErrorKind::invalid_parameter,
          "Bessel profiles need a ball or annulus centered at the origin");
  require(lambda > 0.0, ErrorKind::invalid_parameter, "lambda must be positive");
  require(ell >= 0, ErrorKind::invalid_parameter, "angular index must be nonnegative");
  nu_ = ell + 0.5 * dim_ - 1.0;
  k_ = std::sqrt(lambda);
  const double s = 1.0 - 0.5 * dim_;

  std::vector<double> cuts{0.0};
  std::vector<bool> inside;
  for (const auto& [a, b] : domain.radial_intervals()) {
    if (a > cuts.back()) {
      inside.push_back(false);
      cuts.push_back(a);
    }
    inside.push_back(true);
    cuts.push_back(b);
  }
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    layers_.push_back({cuts[i], cuts[i + 1], inside[i], 1.0, 0.0});

  for (std::size_t i = 1; i < layers_.size(); ++i) {
    const double r = layers_[i].lo;
    const double u = eval(layers_[i - 1], r, false);
    const double du = eval(layers_[i - 1], r, true);
    const Basis2 b = bessel_pair(layers_[i].inside, nu_, k_, s, r);
    const double det = b.f1 * b.d2 - b.f2 * b.d1;
    layers_[i].a = (u * b.d2 - b.f2 * du) / det;
    layers_[i].b = (b.f1 * du - u * b.d1) / det;
  }
  const double r = cuts.back();
  const double u = eval(layers_.back(), r, false);
  const double du = eval(layers_.back(), r, true);
  const Basis2 e = bessel_pair(false, nu_, k_, s, r);
  mismatch_ = (u * e.d2 - du * e.f2) / std::sqrt((u * u + du * du) * (e.f2 * e.f2 + e.d2 * e.d2));
  layers_.push_back({r, std::numeric_limits<double>::infinity(), false, 0.0, u / e.f2});
}

double BesselProfile::eval(const Layer& layer, double r, bool deriv) const {
  if (r < kSmallR) {
    // regular behavior r^l (k/2)^nu / Gamma(nu + 1), or its I analogue
    const double c = layer.a * std::pow(0.5 * k_, nu_) / std::tgamma(nu_ + 1.0);
    if (deriv) return ell_ == 1 ? c : 0.0;
    return ell_ == 0 ? c : c * std::pow(r, ell_);
  }
  const Basis2 b = bessel_pair(layer.inside, nu_, k_, 1.0 - 0.5 * dim_, r);
  return deriv ? layer.a * b.d1 + layer.b * b.d2 : layer.a * b.f1 + layer.b * b.f2;
}

const BesselProfile::Layer& BesselProfile::layer_at(double r) const {
  for (const auto& l : layers_)
    if (r < l.hi) return l;
  return layers_.back();
}

double BesselProfile::operator()(double r) const { return scale_ * eval(layer_at(r), r, false); }

double BesselProfile::derivative(double r) const { return scale_ * eval(layer_at(r), r, true); }

void BesselProfile::normalize() {
  scale_ = 1.0;
  const auto [t, w] = gauss_legendre(16);
  const double seg = 0.05 * std::min(1.0, 1.0 / k_);
  double total = 0.0;
  for (const auto& l : layers_) {
    const double hi = std::isfinite(l.hi) ? l.hi : l.lo + 60.0 / k_;
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - l.lo) / seg)));
    const double width = (hi - l.lo) / pieces;
    const double q = l.inside ? 1.0 : -1.0;
    for (int p = 0; p < pieces; ++p) {
      const double a = l.lo + p * width;
      for (Index i = 0; i < t.size(); ++i) {
        const double r = a + 0.5 * width * (t[i] + 1.0);
        const double u = eval(l, r, false);
        total += 0.5 * width * w[i] * q * u * u * std::pow(r, dim_ - 1);
      }
    }
  }
  if (ell_ == 0) total *= unit_sphere_area(dim_);
  require(total > 0.0, ErrorKind::invalid_parameter, "profile has nonpositive weighted norm");
  scale_ = 1.0 / std::sqrt(total);
}

double radial_mismatch(const Domain& domain, int ell, double lambda) {
  return BesselProfile(domain, ell, lambda).mismatch();
}

RadialMode radial_shoot(const Domain& domain, int k, int ell,
                        std::optional<std::pair<double, double>> bracket) {
  require(domain.is_centered_radial(), ErrorKind::invalid_parameter,
          "radial shooting needs a ball or annulus centered at the origin");
  require(k >= 1, ErrorKind::invalid_parameter, "mode index must be positive");
  const double r_char = domain.circumscribing_radius();
  auto [lo, hi] = bracket.value_or(std::make_pair(0.0, 50.0 / (r_char * r_char)));
  require(hi > lo && lo >= 0.0, ErrorKind::invalid_parameter, "empty bracket");

  constexpr int kSteps = 200;
  const double step = (hi - lo) / kSteps;
  double prev_l = lo > 0.0 ? lo : step;
  double prev_f = radial_mismatch(domain, ell, prev_l);
  int found = 0;
  double a = 0.0, b = 0.0, fa = 0.0;
  for (int i = lo > 0.0 ? 1 : 2; i <= kSteps; ++i) {
    const double l = lo + step * i;
    const double f = radial_mismatch(domain, ell, l);
    if ((prev_f < 0.0) != (f < 0.0) || f == 0.0) {
      if (++found == k) {
        a = prev_l;
        b = l;
        fa = prev_f;
        break;
      }
    }
    prev_l = l;
    prev_f = f;
  }
  require(found == k, ErrorKind::bracket,
          "matching function has only " + std::to_string(found) + " sign changes in the bracket");
  for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * b; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = radial_mismatch(domain, ell, m);
    if (fm == 0.0) {
      a = b = m;
      break;
    }
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  RadialMode mode;
  mode.lambda = 0.5 * (a + b);
  mode.ell = ell;
  mode.index = k;
  mode.profile = BesselProfile(domain, ell, mode.lambda);
  mode.profile.normalize();
  mode.mismatch = mode.profile.mismatch();
  require(std::abs(mode.mismatch) < 1e-10, ErrorKind::convergence,
          "bisection did not reach the matching tolerance");
  return mode;
}

ScalarField RadialMode::sample(const RadialGrid& grid) const {
  require(ell == 0, ErrorKind::invalid_parameter, "radial grids carry l = 0 profiles only");
  VectorXd v(grid.m);
  for (Index j = 0; j < grid.m; ++j) v[j] = profile(grid.radius(j));
  return ScalarField(grid, std::move(v));
}

ScalarField RadialMode::sample(const BoxGrid& grid, const Vector3d& axis) const {
  require(ell <= 1, ErrorKind::invalid_parameter, "box sampling supports l = 0 and l = 1");
  require(profile.dim() == 3, ErrorKind::invalid_parameter, "box grids are three-dimensional");
  const Vector3d e = axis.normalized();
  const double harmonic = std::sqrt(3.0 / unit_sphere_area(3));
  VectorXd v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const Vector3d x = grid.node(i);
    const double r = x.norm();
    v[i] = profile(r);
    if (ell == 1) v[i] *= r > 0.0 ? harmonic * x.dot(e) / r : 0.0;
  }
  return ScalarField(grid, std::move(v));
}

std::vector<NegativeScanRow> negative_spectrum_scan(const Domain& domain,
                                                    const std::vector<double>& l_list, int n,
                                                    double tol) {
  require(!l_list.empty(), ErrorKind::invalid_parameter, "empty L list");
  require(std::is_sorted(l_list.begin(), l_list.end()), ErrorKind::invalid_parameter,
          "L list must be ascending");
  std::vector<NegativeScanRow> rows;
  for (double L : l_list) {
    const BoxGrid g = build_box_grid(L, n);
    const Discretization disc = Discretization::box(g, domain);
    const Discretization flipped = disc.with_weight(-disc.weight());
    const EigenBasis b = solve_pencil(flipped, 1, tol);
    rows.push_back({L, -b[0].lambda, n});
  }
  return rows;
}

}  // namespace qomega
