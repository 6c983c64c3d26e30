// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qomega;

namespace {

const double kPi = std::numbers::pi;

ScalarField radial_field(double r_max, int m, const std::function<double(double)>& f) {
  const RadialGrid g = build_radial_grid(3, r_max, m);
  VectorXd v(m);
  for (Index j = 0; j < m; ++j) v[j] = f(g.radius(j));
  return {g, v};
}

ScalarField box_field(const BoxGrid& g, const std::function<double(const Vector3d&)>& f) {
  VectorXd v(g.size());
  for (Index i = 0; i < g.size(); ++i) v[i] = f(g.node(i));
  return {g, v};
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::io;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("reference constants") {
  CHECK(decay_constant_cp(3.0, 3) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(serrin_constant_small(3) == doctest::Approx(std::sqrt(5.0) / 2.0).epsilon(1e-14));
  CHECK(serrin_constant_large(3) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(decay_constant_cq(3.0, 3) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(decay_constant_cp(4.5, 3), Error);
  CHECK_THROWS_AS(decay_constant_cp(2.0, 3), Error);
}

TEST_CASE("linear decay fits recover exact rates") {
  const double lambda = 2.25;
  const ScalarField f = radial_field(20.0, 2000, [](double r) {
    return r > 0.0 ? 3.0 * std::exp(-1.5 * r) / r : 3.0;
  });
  const FitReport rep = fit_linear_decay(f, lambda, 2.0, 12.0);
  CHECK(rep.fitted_rate == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(rep.relative_error() < 1e-10);
  CHECK(rep.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.amplitude == doctest::Approx(3.0).epsilon(1e-8));

  const BoxGrid g = build_box_grid(6.0, 48);
  const FitReport box = fit_linear_decay(
      box_field(g, [](const Vector3d& x) { return std::exp(-1.5 * x.norm()) / x.norm(); }), lambda,
      1.5, 5.0);
  CHECK(box.relative_error() < 1e-6);
}

TEST_CASE("growing fields are clamped to zero rate") {
  const ScalarField f = radial_field(20.0, 2000, [](double) { return 1.0; });
  const FitReport rep = fit_linear_decay(f, 1.0, 2.0, 12.0);
  CHECK(rep.fitted_rate == 0.0);
  CHECK(rep.r_squared == 0.0);
}

TEST_CASE("narrow windows are rejected") {
  const ScalarField f = radial_field(20.0, 1000, [](double r) { return std::exp(-r); });
  CHECK(kind_of([&] { fit_linear_decay(f, 1.0, 2.0, 2.1); }) == ErrorKind::insufficient_window);
  CHECK(fit_linear_decay(f, 1.0, 10.0, 30.0).r_hi == doctest::Approx(20.0 - 5.0 * 0.02));
}

TEST_CASE("dipole mode decays at the eigenvalue rate") {
  const Domain ball = Domain::ball(3, 1.0);
  const RadialMode mode = radial_shoot(ball, 1, 1);
  const BoxGrid g = build_box_grid(Vector3d::Constant(6.0), 0.15);
  const FitReport rep = fit_linear_decay(mode.sample(g, Vector3d::UnitX()), mode.lambda, 2.0, 5.0);
  CHECK(rep.relative_error() < 0.02);
}

TEST_CASE("semilinear decay laws") {
  const Domain ball = Domain::ball(3, 1.0);
  const GroundState s3 = radial_ground_state(ball, 3.0, 40000, 2000.0);
  const FitReport r3 = fit_semilinear_decay(s3, 30.0, 1000.0);
  CHECK(r3.model == DecayModel::power);
  CHECK(r3.reference_rate == doctest::Approx(2.0));
  CHECK(r3.relative_error() < 0.02);

  const GroundState s4 = radial_ground_state(ball, 4.0, 50000, 1000.0);
  const FitReport r4 = fit_semilinear_decay(s4, 3.0, 100.0);
  CHECK(r4.model == DecayModel::serrin_log);
  CHECK(r4.reference_rate == doctest::Approx(1.0));
  CHECK(r4.relative_error() < 0.01);

  GroundState above = s4;
  above.p = 4.5;
  CHECK(kind_of([&] { fit_semilinear_decay(above, 3.0, 100.0); }) == ErrorKind::unsupported_model);
  CHECK(kind_of([&] { fit_semilinear_decay(s3, 0.5, 100.0); }) == ErrorKind::insufficient_window);
}

TEST_CASE("nodal domains") {
  CHECK(count_nodal_domains(radial_field(10.0, 500, [](double r) { return std::cos(r); })) == 4);
  CHECK(count_nodal_domains(radial_field(10.0, 500, [](double r) { return std::exp(-r); })) == 1);
  const BoxGrid g = build_box_grid(1.0, 20);
  CHECK(count_nodal_domains(box_field(g, [](const Vector3d& x) { return x[0]; })) == 2);
  CHECK(count_nodal_domains(box_field(g, [](const Vector3d& x) { return x[0] * x[1]; })) == 4);
  CHECK(count_nodal_domains(box_field(g, [](const Vector3d& x) { return x[0] * x[1] * x[2]; })) ==
        8);
}

TEST_CASE("radial symmetry check") {
  const Domain ball = Domain::ball(3, 1.0);
  const BoxGrid g = build_box_grid(3.0, 40);
  CHECK(check_radial(box_field(g, [](const Vector3d& x) { return std::exp(-x.squaredNorm()); }),
                     ball) < 1e-3);
  CHECK(check_radial(box_field(g, [](const Vector3d& x) {
                       return std::exp(-x.squaredNorm()) * (1.0 + 0.3 * x[0]);
                     }),
                     ball) > 0.05);
  CHECK(check_radial(radial_field(5.0, 100, [](double r) { return std::cos(r); }), ball) == 0.0);
  CHECK_THROWS_AS(check_radial(box_field(g, [](const Vector3d&) { return 1.0; }),
                               Domain::box(Vector3d::Zero(), Vector3d(1, 1, 1))),
                  Error);
}

TEST_CASE("foliated Schwarz check") {
  const Domain ball = Domain::ball(3, 1.0);
  const BoxGrid g = build_box_grid(3.0, 40);
  const FoliatedReport good = check_foliated_schwarz(
      box_field(g, [](const Vector3d& x) { return std::exp(-x.squaredNorm()) * (1.0 + 0.5 * x[1]); }),
      ball);
  CHECK(std::abs(good.axis[1]) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(good.axial_dev < 5e-3);
  CHECK(good.monotonicity_violation < 1e-2);
  CHECK(good.reflection_violation < 1e-2);
  CHECK(good.directions == 20);

  const FoliatedReport bad = check_foliated_schwarz(
      box_field(g, [](const Vector3d& x) { return std::exp(-x.squaredNorm()) * x[0] * x[1]; }),
      ball);
  CHECK(std::max({bad.axial_dev, bad.monotonicity_violation, bad.reflection_violation}) > 0.05);

  CHECK(kind_of([&] {
          check_foliated_schwarz(box_field(g, [](const Vector3d&) { return 0.0; }), ball);
        }) == ErrorKind::axis_undetermined);
}

TEST_CASE("Faber-Krahn comparisons") {
  const ComparisonReport annulus = faber_krahn(Domain::annulus(3, 1.0, 2.0));
  CHECK(annulus.verdict);
  CHECK_FALSE(annulus.equality);
  CHECK(annulus.lhs > annulus.rhs);

  const ComparisonReport ball = faber_krahn(Domain::ball(3, 1.0));
  CHECK(ball.verdict);
  CHECK(ball.equality);

  FaberKrahnOptions coarse;
  coarse.h = 0.2;
  const ComparisonReport shifted = faber_krahn(Domain::ball(Vector3d(0.3, 0.0, 0.0), 1.0), coarse);
  CHECK(shifted.verdict);
  CHECK(shifted.equality);

  const ComparisonReport two =
      faber_krahn(Domain::union_of_balls({{Vector3d(-2, 0, 0), 0.8}, {Vector3d(2, 0, 0), 0.8}}),
                  coarse);
  CHECK(two.verdict);
  CHECK(two.lhs > two.rhs);
}

TEST_CASE("second eigenvalue bound is sign invariant") {
  const Discretization disc =
      Discretization::radial(build_radial_grid(3, 16.0, 800), Domain::ball(3, 1.0));
  EigenBasis basis = solve_pencil(disc, 2);
  const ComparisonReport a = second_eig_bound(disc, basis);
  basis.pairs[1].phi.values *= -1.0;
  const ComparisonReport b = second_eig_bound(disc, basis);
  CHECK(a.verdict);
  CHECK(a.lhs == doctest::Approx(b.lhs));
  CHECK(a.rhs == doctest::Approx(b.rhs));
  basis.pairs.resize(1);
  CHECK_THROWS_AS(second_eig_bound(disc, basis), Error);
}

TEST_CASE("HKS inputs are validated") {
  const double c = 2.0 * volume(Domain::ball(3, 1.0));
  CHECK_THROWS_AS(hks_sequence(c, {}), Error);
  CHECK_THROWS_AS(hks_sequence(c, {6.0, 4.0}), Error);
  CHECK_THROWS_AS(hks_sequence(c, {1.5}), Error);
  CHECK_THROWS_AS(hks_sequence(-1.0, {3.0}), Error);
}

TEST_CASE("Pohozaev identity") {
  const Domain ball = Domain::ball(3, 1.0);
  const Discretization disc = Discretization::radial(build_radial_grid(3, 16.0, 512), ball);
  const EigenPair phi = solve_pencil(disc, 1, 1e-12)[0];
  const PohozaevReport eig = pohozaev_residual(disc, phi.phi, Nonlinearity::eigen(phi.lambda));
  CHECK(std::abs(eig.relative) < 1e-2);
  CHECK(eig.boundary_term > 0.0);

  const PohozaevReport zero =
      pohozaev_residual(disc, ScalarField(disc.grid(), VectorXd::Zero(disc.size())),
                        Nonlinearity::power(2.5));
  CHECK(zero.residual == 0.0);

  const GroundState s = radial_ground_state(ball, 2.5, 512, 16.0);
  const PohozaevReport pw = pohozaev_residual(disc, s);
  CHECK(std::abs(pw.relative) < 1e-2);
  CHECK(pw.boundary_term > 0.0);

  CHECK(Nonlinearity::power(3.0).primitive(-2.0) == doctest::Approx(8.0 / 3.0));
  CHECK(Nonlinearity::eigen(2.0).primitive(3.0) == doctest::Approx(9.0));

  const BoxGrid g = build_box_grid(2.0, 15);
  const Discretization box = Discretization::box(g, Domain::box(Vector3d::Zero(), Vector3d(1, 1, 1)));
  CHECK(kind_of([&] {
          pohozaev_residual(box, ScalarField(g, VectorXd::Ones(g.size())), Nonlinearity::power(2.5));
        }) == ErrorKind::unsupported_shape);
}

TEST_CASE("grid symmetry groups") {
  const BoxGrid g = build_box_grid(4.0, 15);
  CHECK(symmetry_group(Discretization::box(g, Domain::ball(3, 1.0))).size() == 48);
  CHECK(symmetry_group(Discretization::box(g, Domain::annulus(3, 1.0, 2.0))).size() == 48);
  CHECK(symmetry_group(Discretization::box(
                           g, Domain::union_of_balls({{Vector3d(-2, 0, 0), 1.0},
                                                      {Vector3d(2, 0, 0), 1.0}})))
            .size() == 16);
  CHECK(symmetry_group(Discretization::box(g, Domain::box(Vector3d::Zero(), Vector3d(1, 2, 3))))
            .size() == 8);
  CHECK(symmetry_group(Discretization::box(g, Domain::ball(Vector3d(0.31, 0.17, 0.05), 1.0)))
            .size() == 1);
}

TEST_CASE("uniqueness with a single start") {
  const Discretization disc =
      Discretization::radial(build_radial_grid(3, 12.0, 400), Domain::ball(3, 1.0));
  const UniquenessReport rep = multistart_uniqueness(disc, 2.5, 1);
  CHECK(rep.n_distinct == 1);
  CHECK(rep.n_least == 1);
  CHECK(rep.n_failed == 0);
  CHECK(rep.max_pairwise_dist == 0.0);
  CHECK_THROWS_AS(multistart_uniqueness(disc, 2.5, 0), Error);
  CHECK_THROWS_AS(multistart_uniqueness(disc, 1.5, 3), Error);
}

TEST_CASE("asymptotic constant of a unit-normalized indicator") {
  const Discretization disc =
      Discretization::radial(build_radial_grid(3, 4.0, 400), Domain::ball(3, 2.0));
  VectorXd phi = VectorXd::Zero(disc.size());
  for (Index j = 0; j < 100; ++j) phi[j] = 1.0;
  const double d = phi.cwiseProduct(disc.weight()).dot(phi);
  phi /= std::sqrt(d);
  CHECK(asymptotic_constant(disc, phi) == doctest::Approx(std::sqrt(d)).epsilon(1e-12));
}

}  // TEST_SUITE
