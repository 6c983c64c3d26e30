// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance run: one PASS/FAIL line per criterion.
// Usage: qomega_acceptance [criterion numbers...]

#include "qomega/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <string>
#include <vector>

using namespace qomega;

namespace {

const double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Domain unit_ball() { return Domain::ball(3, 1.0); }
Domain annulus12() { return Domain::annulus(3, 1.0, 2.0); }
Domain far_balls() {
  return Domain::union_of_balls({{Vector3d(-3, 0, 0), 1.0}, {Vector3d(3, 0, 0), 1.0}});
}

Discretization radial_disc(const Domain& d, double r_max, int m) {
  return Discretization::radial(build_radial_grid(3, r_max, m), d);
}

// ---- shared fixtures ---------------------------------------------------------

struct BallBox {
  std::unique_ptr<Discretization> disc;
  EigenBasis basis;
  double tol = 1e-9;
};

/// Ball(0,1) at h = 0.1 with its first four eigenpairs.
const BallBox& ball_box() {
  static BallBox fx = [] {
    BallBox b;
    const Domain ball = unit_ball();
    const double lambda = radial_shoot(ball).lambda;
    b.disc = std::make_unique<Discretization>(
        Discretization::box(truncation_grid(ball, lambda, 0.1), ball));
    b.basis = solve_pencil(*b.disc, 4, b.tol);
    return b;
  }();
  return fx;
}

/// The three nondegeneracy/uniqueness fixtures at h = 0.2.
const Discretization& fixture(int which) {
  static std::map<int, std::unique_ptr<Discretization>> cache;
  auto& slot = cache[which];
  if (!slot) {
    const Domain d = which == 0 ? unit_ball() : which == 1 ? annulus12() : far_balls();
    const double lambda = radial_shoot(which == 1 ? annulus12() : unit_ball()).lambda;
    slot = std::make_unique<Discretization>(
        Discretization::box(truncation_grid(d, lambda, 0.2, 8, 6.0), d));
  }
  return *slot;
}

const char* fixture_name(int which) {
  return which == 0 ? "ball" : which == 1 ? "annulus" : "far balls";
}

// ---- criteria ------------------------------------------------------------------

Outcome radial_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const double shot = radial_shoot(unit_ball()).lambda;
  const double elapsed = seconds_since(t0);
  // cot k = -1  <=>  cos k + sin k = 0 on (pi/2, pi)
  double lo = kPi / 2.0, hi = kPi;
  for (int i = 0; i < 200; ++i) {
    const double k = 0.5 * (lo + hi);
    (std::cos(k) + std::sin(k) > 0.0 ? lo : hi) = k;
  }
  const double k = 0.5 * (lo + hi);
  const double err = std::abs(shot - k * k);
  return {err < 1e-8 && elapsed < 1.0,
          fmt("Lambda1=%.10f bisection=%.10f |diff|=%.1e time=%.3fs", shot, k * k, err, elapsed)};
}

Outcome box_radial_agreement() {
  const Domain ball = unit_ball();
  const double exact = radial_shoot(ball).lambda;
  const double coarse = ball_box().basis[0].lambda;
  const double fine =
      solve_pencil(Discretization::box(truncation_grid(ball, exact, 0.05), ball), 1, 1e-9)[0]
          .lambda;
  const double e1 = std::abs(coarse - exact) / exact, e2 = std::abs(fine - exact) / exact;
  return {e1 < 0.02 && e2 < e1,
          fmt("h=0.1: %.7f (rel %.2e), h=0.05: %.7f (rel %.2e), radial %.7f", coarse, e1, fine,
              e2, exact)};
}

Outcome scaling_law() {
  const double r1 = solve_pencil(radial_disc(unit_ball(), 16.0, 1600), 1, 1e-12)[0].lambda;
  const double r2 =
      solve_pencil(radial_disc(Domain::ball(3, 2.0), 32.0, 1600), 1, 1e-12)[0].lambda;
  const BoxGrid g1 = truncation_grid(unit_ball(), r1, 0.2);
  const BoxGrid g2 = build_box_grid(2.0 * g1.half_widths(), 0.4, Vector3d::Zero(), 1);
  const double b1 = solve_pencil(Discretization::box(g1, unit_ball()), 1, 1e-10)[0].lambda;
  const double b2 =
      solve_pencil(Discretization::box(g2, Domain::ball(3, 2.0)), 1, 1e-10)[0].lambda;
  const double er = std::abs(4.0 * r2 / r1 - 1.0), eb = std::abs(4.0 * b2 / b1 - 1.0);
  return {er < 5e-3 && eb < 5e-3 && (g1.n == g2.n).all(),
          fmt("radial 4*L(B2)/L(B1)-1=%.1e, box=%.1e", er, eb)};
}

Outcome orthogonality() {
  const BallBox& b = ball_box();
  const double ga = b.basis.gram_a_offdiag(), gd = b.basis.gram_d_offdiag();
  const double gap = b.basis[1].lambda - b.basis[0].lambda;
  const double floor = 100.0 * b.tol * b.basis[1].lambda;
  return {ga <= 1e-8 && gd <= 1e-8 && gap > floor,
          fmt("gramA=%.1e gramD=%.1e L2-L1=%.6f (floor %.1e)", ga, gd, gap, floor)};
}

Outcome courant() {
  const BallBox& b = ball_box();
  std::vector<int> counts;
  bool signs = true;
  for (std::size_t k = 0; k < b.basis.size(); ++k) {
    const ScalarField& phi = b.basis[k].phi;
    counts.push_back(count_nodal_domains(phi));
    if (k >= 1) {
      const double t = 1e-3 * phi.sup_norm();
      signs = signs && phi.values.maxCoeff() > t && phi.values.minCoeff() < -t;
    }
  }
  const bool ok = counts[0] == 1 && counts[1] == 2 && counts[2] <= 3 && counts[3] <= 4 && signs;
  return {ok, fmt("nodal counts %d %d %d %d, sign changes %s", counts[0], counts[1], counts[2],
                  counts[3], signs ? "yes" : "no")};
}

Outcome linear_decay() {
  const Discretization rd = radial_disc(unit_ball(), 16.0, 3200);
  const EigenPair pr = solve_pencil(rd, 1, 1e-12)[0];
  const FitReport radial = fit_linear_decay(pr.phi, pr.lambda, 2.0, 12.0);
  const EigenPair& pb = ball_box().basis[0];
  const FitReport box = fit_linear_decay(pb.phi, pb.lambda, 1.5, 10.0);
  const double ref = 0.75 * kPi;
  const double er = std::abs(radial.fitted_rate - ref) / ref;
  const double eb = std::abs(box.fitted_rate - ref) / ref;
  return {er < 0.01 && eb < 0.03,
          fmt("radial rate %.5f (rel %.1e), 3D rate %.5f on [1.5,%.2f] (rel %.1e), 3pi/4=%.5f",
              radial.fitted_rate, er, box.fitted_rate, box.r_hi, eb, ref)};
}

Outcome faber_krahn_check() {
  const ComparisonReport a = faber_krahn(annulus12());
  const ComparisonReport b = faber_krahn(unit_ball());
  return {a.margin > a.tolerance && a.verdict && b.equality,
          fmt("annulus %.7f > ball(7^(1/3)) %.7f, margin %.3e vs 3x error %.1e; ball equality %s",
              a.lhs, a.rhs, a.margin, a.tolerance, b.equality ? "yes" : "no")};
}

Outcome hks() {
  const double c = 2.0 * volume(unit_ball());
  const auto rows = hks_sequence(c, {3.0, 4.0, 6.0, 8.0});
  bool gaps_ok = true, bound = true;
  std::string gaps;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    gaps_ok = gaps_ok && rows[i].gap > 0.0;
    if (i > 0) gaps_ok = gaps_ok && rows[i].gap < rows[i - 1].gap;
    bound = bound && rows[i].second_bound.verdict;
    gaps += fmt("%s%.2e", i ? " " : "", rows[i].gap);
  }
  const double rel = rows.back().gap / rows.back().exact_reference;
  return {gaps_ok && bound && rel < 0.01,
          fmt("gaps %s, d=8 relative %.1e, second bound on all runs: %s", gaps.c_str(), rel,
              bound ? "yes" : "no")};
}

Outcome symmetry() {
  const BallBox& b = ball_box();
  const double radial = check_radial(b.basis[0].phi, unit_ball());
  const FoliatedReport f = check_foliated_schwarz(b.basis[1].phi, unit_ball());
  const bool ok = radial < 5e-3 && f.axial_dev < 1e-2 && f.monotonicity_violation < 1e-2 &&
                  f.reflection_violation < 1e-2;
  return {ok, fmt("phi1 radial dev %.1e; phi2 axial %.1e, monotonicity %.1e, reflection %.1e",
                  radial, f.axial_dev, f.monotonicity_violation, f.reflection_violation)};
}

Outcome p_to_two() {
  const double R = 0.75 * kPi;
  const Discretization disc = radial_disc(Domain::ball(3, R), 40.0 * R, 4000);
  SweepOptions o;
  o.linearized = false;
  const SweepResult s = p_sweep(disc, {2.4, 2.2, 2.1, 2.05}, o);
  bool monotone = true;
  std::string alphas;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    monotone = monotone && s.rows[i].error.empty();
    if (i > 0)
      monotone = monotone && std::abs(s.rows[i].alpha_p - 1.0) < std::abs(s.rows[i - 1].alpha_p - 1.0);
    alphas += fmt("%s%.5f", i ? " " : "", s.rows[i].alpha_p);
  }
  const double est = s.rows.back().const_estimate;
  const double rel = std::abs(est - s.target_constant) / s.target_constant;
  return {monotone && rel < 0.03,
          fmt("Lambda1=%.6f alphas %s; const_estimate(2.05)=%.4f vs %.4f (rel %.1e)", s.lambda1,
              alphas.c_str(), est, s.target_constant, rel)};
}

Outcome sup_norm() {
  const Domain ball = unit_ball();
  const double r_max = 40.0;
  const int m = 4000;
  const Discretization disc = radial_disc(ball, r_max, m);
  const EigenPair phi = solve_pencil(disc, 1, 1e-12)[0];
  const GroundState s = radial_ground_state(ball, 2.05, m, r_max);
  const double sup_pow = sup_norm_scaling(s).m_pow;
  const double rel = std::abs(sup_pow - phi.lambda) / phi.lambda;
  const VectorXd u = s.v.values / s.v.values.cwiseAbs().maxCoeff();
  const VectorXd f = phi.phi.values / phi.phi.values.cwiseAbs().maxCoeff();
  const RadialGrid& g = disc.radial_grid();
  double dist = 0.0;
  for (Index j = 0; j < m && g.radius(j) <= 2.0; ++j) dist = std::max(dist, std::abs(u[j] - f[j]));
  return {rel < 0.03 && dist < 0.03,
          fmt("sup_pow=%.5f vs Lambda1=%.5f (rel %.1e); profile sup-distance on B2 %.1e", sup_pow,
              phi.lambda, rel, dist)};
}

Outcome nondegeneracy() {
  const std::vector<double> ps{2.5, 2.25, 2.1, 2.05};
  const double floor = 0.1;
  bool ok = true;
  std::string parts;
  for (int w = 0; w < 3; ++w) {
    const SweepResult s = p_sweep(fixture(w), ps);
    double lowest = 1e300;
    for (const SweepRow& r : s.rows) {
      ok = ok && r.error.empty() && r.negative_count == 1 && r.approx_kernel_dim == 0 &&
           std::abs(r.morse_eig + (r.p - 2.0)) < 1e-6 && r.min_abs_transverse >= floor;
      lowest = std::min(lowest, r.min_abs_transverse);
    }
    parts += fmt("%s%s %.3f", w ? ", " : "", fixture_name(w), lowest);
  }
  const Discretization& ball = fixture(0);
  const double lambda = solve_pencil(ball, 1, 1e-10)[0].lambda;
  const SpectralWindow cal = spectrum_near_zero(LinearizedOperator(ball, lambda * ball.weight()), 4);
  ok = ok && cal.approx_kernel_dim >= 1;
  return {ok, fmt("min transverse |eig| over p: %s (floor %.1f); calibration kernel %d",
                  parts.c_str(), floor, cal.approx_kernel_dim)};
}

Outcome uniqueness() {
  bool ok = true;
  std::string parts;
  for (int w = 0; w < 3; ++w) {
    const UniquenessReport u = multistart_uniqueness(fixture(w), 2.1, 20);
    ok = ok && u.n_distinct == 1;
    parts += fmt("%s%s %d orbit(s) from %d least starts", w ? ", " : "", fixture_name(w),
                 u.n_distinct, u.n_least);
  }
  return {ok, parts};
}

Outcome semilinear_decay() {
  const Domain ball = unit_ball();
  const FitReport a =
      fit_semilinear_decay(radial_ground_state(ball, 2.5, 200000, 1e4), 30.0, 1000.0);
  const FitReport b =
      fit_semilinear_decay(radial_ground_state(ball, 3.0, 200000, 1e4), 30.0, 1000.0);
  const FitReport c =
      fit_semilinear_decay(radial_ground_state(ball, 4.0, 50000, 1000.0), 3.0, 100.0);
  const bool ok = a.relative_error() < 0.05 && b.relative_error() < 0.05 &&
                  c.model == DecayModel::serrin_log && c.relative_error() < 0.10;
  return {ok, fmt("p=2.5 slope -%.4f (rel %.1e), p=3 slope -%.4f (rel %.1e), p=4 log slope "
                  "-%.4f (rel %.1e)",
                  a.fitted_rate, a.relative_error(), b.fitted_rate, b.relative_error(),
                  c.fitted_rate, c.relative_error())};
}

Outcome pohozaev() {
  const Domain ball = unit_ball();
  const double r_max = 16.0;
  std::vector<double> eig, pow;
  bool positive = true;
  for (int k : {16, 32, 64, 128}) {
    const int m = static_cast<int>(r_max) * k;
    const Discretization disc = radial_disc(ball, r_max, m);
    const EigenPair phi = solve_pencil(disc, 1, 1e-12)[0];
    const PohozaevReport pe = pohozaev_residual(disc, phi.phi, Nonlinearity::eigen(phi.lambda));
    const PohozaevReport pp = pohozaev_residual(disc, radial_ground_state(ball, 2.5, m, r_max));
    eig.push_back(std::abs(pe.relative));
    pow.push_back(std::abs(pp.relative));
    positive = positive && pe.boundary_term > 0.0 && pp.boundary_term > 0.0;
  }
  const Discretization& box = fixture(0);
  const EigenPair pb = solve_pencil(box, 1, 1e-10)[0];
  positive = positive && pohozaev_residual(box, pb.phi, Nonlinearity::eigen(pb.lambda)).boundary_term > 0.0;
  double order_e = 1e300, order_p = 1e300;
  for (std::size_t i = 1; i < eig.size(); ++i) {
    order_e = std::min(order_e, std::log2(eig[i - 1] / eig[i]));
    order_p = std::min(order_p, std::log2(pow[i - 1] / pow[i]));
  }
  return {order_e >= 1.0 && order_p >= 1.0 && positive,
          fmt("eigen residuals %.1e..%.1e (order >= %.2f), u_2.5 %.1e..%.1e (order >= %.2f), "
              "boundary terms positive: %s",
              eig.front(), eig.back(), order_e, pow.front(), pow.back(), order_p,
              positive ? "yes" : "no")};
}

Outcome negative_scan() {
  const std::vector<double> ls{4.0, 6.0, 8.0};
  const auto rows = negative_spectrum_scan(unit_ball(), ls, 32);
  bool ok = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    ok = ok && std::abs(rows[i].lambda_neg) < std::abs(rows[i - 1].lambda_neg);
  const auto tiny = negative_spectrum_scan(Domain::ball(3, 0.01), ls, 32);
  double worst = 0.0;
  for (const auto& r : tiny) {
    const double ref = -3.0 * kPi * kPi / (4.0 * r.L * r.L);
    worst = std::max(worst, std::abs(r.lambda_neg / ref - 1.0));
  }
  ok = ok && worst < 0.05;
  return {ok, fmt("Lambda_-(L) = %.4f %.4f %.4f; tiny ball max rel error %.1e", rows[0].lambda_neg,
                  rows[1].lambda_neg, rows[2].lambda_neg, worst)};
}

Outcome hygiene() {
  const Discretization& disc = fixture(0);
  const double p = 2.5;
  CounterRng rng(2024);
  const VectorXd v = bump(disc, Vector3d::Zero(), 1.5) + 0.01 * rng.normal_vector(disc.size()).cwiseAbs();
  const VectorXd g = quotient_gradient(disc, v, p);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const VectorXd dir = rng.normal_vector(disc.size()).normalized();
    const double eps = 1e-4 * v.norm();
    const auto q = [&](double s) { return quotient(disc, v + s * eps * dir, p); };
    const double fd = (8.0 * (q(1.0) - q(-1.0)) - (q(2.0) - q(-2.0))) / (12.0 * eps);
    worst = std::max(worst, std::abs(g.dot(dir) - fd) / std::abs(fd));
  }
  SweepOptions o;
  o.linearized = false;
  const SweepResult s = p_sweep(radial_disc(unit_ball(), 40.0, 4000), {2.5, 2.1, 2.05, 2.01}, o);
  bool finite = true;
  for (const SweepRow& r : s.rows)
    finite = finite && r.error.empty() && std::isfinite(r.alpha_p) && std::isfinite(r.ln_sup) &&
             std::isfinite(r.sup_pow) && std::isfinite(r.const_estimate);
  return {worst < 1e-5 && finite,
          fmt("gradient max rel error %.1e over 20 directions; p=2.01 ln|u|_inf=%.1f finite: %s",
              worst, s.rows.back().ln_sup, finite ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"radial oracle exactness", radial_oracle},
      {"3D/radial agreement", box_radial_agreement},
      {"scaling law", scaling_law},
      {"orthogonality", orthogonality},
      {"Courant and sign change", courant},
      {"sharp linear decay", linear_decay},
      {"Faber-Krahn", faber_krahn_check},
      {"HKS", hks},
      {"symmetry", symmetry},
      {"p->2 asymptotics", p_to_two},
      {"sup-norm scaling", sup_norm},
      {"nondegeneracy", nondegeneracy},
      {"uniqueness", uniqueness},
      {"semilinear decay", semilinear_decay},
      {"Pohozaev", pohozaev},
      {"negative-spectrum scan", negative_scan},
      {"numerical hygiene", hygiene},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const Error& e) {
      o = {false, std::string("error (") + to_string(e.kind()) + "): " + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%2d] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
