// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/discretize.hpp"
#include "qomega/eigensolve.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace qomega;

namespace {

const double kPi = std::numbers::pi;

double rayleigh(const Discretization& disc, const VectorXd& u) {
  return u.dot(disc.apply_stiffness(u)) / u.cwiseProduct(disc.mass()).dot(u);
}

VectorXd cube_mode(const BoxGrid& g) {
  const double L = g.half_widths()[0];
  VectorXd u(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const Vector3d x = g.node(i);
    u[i] = std::cos(kPi * x[0] / (2 * L)) * std::cos(kPi * x[1] / (2 * L)) *
           std::cos(kPi * x[2] / (2 * L));
  }
  return u;
}

}  // namespace

TEST_SUITE("discretize") {

TEST_CASE("box grid spacing") {
  const BoxGrid g = build_box_grid(6.0, 64);
  CHECK(g.h == doctest::Approx(12.0 / 65.0));
  CHECK(g.size() == 64 * 64 * 64);
  CHECK(build_box_grid(1.0, 8).h == doctest::Approx(2.0 / 9.0));
  CHECK_THROWS_AS(build_box_grid(0.0, 64), Error);
  CHECK_THROWS_AS(build_box_grid(1.0, 4), Error);
}

TEST_CASE("stiffness annihilates constants away from the boundary") {
  const BoxGrid g = build_box_grid(1.0, 10);
  const Discretization disc = Discretization::box(g, Domain::ball(3, 0.5));
  const VectorXd y = disc.apply_stiffness(VectorXd::Ones(g.size()));
  for (Index i = 0; i < g.size(); ++i) {
    const auto c = g.coords(i);
    if ((c > 0).all() && (c < g.n - 1).all()) CHECK(y[i] == 0.0);
  }
}

TEST_CASE("stiffness is exactly symmetric and positive definite") {
  for (const Grid& grid : {Grid(build_box_grid(1.0, 9)), Grid(build_radial_grid(3, 5.0, 60))}) {
    const SparseMatrix a = assemble_stiffness(grid);
    CHECK((SparseMatrix(a.transpose()) - a).norm() == 0.0);
    CounterRng rng(9);
    for (int t = 0; t < 100; ++t) {
      const VectorXd u = rng.normal_vector(a.rows());
      CHECK(u.dot(a * u) > 0.0);
    }
  }
}

TEST_CASE("matrix-free and assembled stiffness agree") {
  const BoxGrid g = build_box_grid(1.0, 12);
  const Discretization disc = Discretization::box(g, Domain::ball(3, 0.5));
  CounterRng rng(2);
  const VectorXd u = rng.normal_vector(g.size());
  CHECK((disc.apply_stiffness(u) - disc.stiffness_matrix() * u).norm() <=
        1e-13 * (disc.stiffness_matrix() * u).norm());
}

TEST_CASE("first cube mode converges at second order") {
  double prev = 0.0;
  for (int n : {15, 31}) {
    const BoxGrid g = build_box_grid(1.0, n);
    const Discretization disc = Discretization::box(g, Domain::ball(3, 0.5));
    const double err = std::abs(rayleigh(disc, cube_mode(g)) - 3.0 * std::pow(kPi / 2.0, 2));
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("radial quotient of r^2 - R^2 converges at second order") {
  const double R = 2.0;
  const double exact = 10.5 / (R * R);
  double prev = 0.0;
  for (int m : {100, 200, 400}) {
    const RadialGrid g = build_radial_grid(3, R, m);
    const Discretization disc = Discretization::radial(g, Domain::ball(3, 1.0));
    VectorXd u(m);
    for (Index j = 0; j < m; ++j) u[j] = g.radius(j) * g.radius(j) - R * R;
    const double err = std::abs(rayleigh(disc, u) - exact);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.15));
    prev = err;
  }
}

TEST_CASE("weight fractions inside, outside and on a flat face") {
  const BoxGrid g = build_box_grid(2.0, 19);  // h = 0.2, node at 0
  const Domain box = Domain::box(Vector3d::Zero(), Vector3d(1.0, 1.0, 1.0));
  const VectorXd q = assemble_weight_fraction(g, box);
  CHECK(q[g.index(9, 9, 9)] == 1.0);
  CHECK(q[g.index(0, 0, 0)] == -1.0);
  CHECK(q[g.index(14, 9, 9)] == doctest::Approx(0.0).epsilon(1e-14));  // x = 1
  CHECK(q[g.index(14, 14, 9)] == doctest::Approx(-0.5).epsilon(1e-14));  // edge
  CHECK(q.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("total weight tends to 2|Omega| - |box|") {
  const Domain ball = Domain::ball(3, 1.0);
  for (int n : {31, 63}) {
    const BoxGrid g = build_box_grid(2.0, n);
    const double box_volume = std::pow(g.h * n, 3);
    const double target = 2.0 * volume(ball) - box_volume;
    CHECK(std::abs(assemble_weight(g, ball).sum() - target) < 3e-3 * volume(ball));
  }
  const RadialGrid r = build_radial_grid(3, 3.0, 300);
  const double shells = 4.0 * kPi / 3.0 * std::pow(3.0 - 0.5 * r.delta(), 3);
  CHECK(assemble_weight(r, ball).sum() ==
        doctest::Approx(2.0 * volume(ball) - shells).epsilon(1e-12));
}

TEST_CASE("weight requires the domain inside the box") {
  CHECK_THROWS_AS(assemble_weight(build_box_grid(1.0, 9), Domain::ball(3, 2.0)), Error);
}

TEST_CASE("surface quadrature oracles") {
  const double rho = 0.8;
  const BoxGrid g = build_box_grid(1.5, 29);
  const ScalarField one(g, VectorXd::Ones(g.size()));
  const double sphere = rho * 4.0 * kPi * rho * rho;
  CHECK(surface_quadrature(Domain::ball(3, rho), one) == doctest::Approx(sphere).epsilon(1e-12));
  CHECK(surface_quadrature(Domain::ball(Vector3d(0.2, -0.1, 0.1), rho), one) ==
        doctest::Approx(sphere).epsilon(1e-12));
  VectorXd x2(g.size());
  for (Index i = 0; i < g.size(); ++i) x2[i] = std::pow(g.node(i)[0], 2);
  CHECK(surface_quadrature(Domain::ball(3, 1.0), ScalarField(g, x2)) ==
        doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-2));
  const RadialGrid r = build_radial_grid(3, 3.0, 300);
  CHECK(surface_quadrature(Domain::ball(3, 1.0), ScalarField(r, VectorXd::Ones(300))) ==
        doctest::Approx(4.0 * kPi).epsilon(1e-12));
  CHECK(surface_quadrature(Domain::annulus(3, 1.0, 2.0), ScalarField(r, VectorXd::Ones(300))) ==
        doctest::Approx(4.0 * kPi * (8.0 - 1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(surface_quadrature(Domain::box(Vector3d::Zero(), Vector3d(1, 1, 1)), one),
                  Error);
}

TEST_CASE("radial phi_1 has the right quotient on the 3D operators") {
  const Domain ball = Domain::ball(3, 1.0);
  const RadialMode mode = radial_shoot(ball);
  const BoxGrid g = build_box_grid(Vector3d::Constant(4.4), 0.1);
  const Discretization disc = Discretization::box(g, ball);
  const VectorXd u = mode.sample(g).values;
  const double q = u.dot(disc.apply_stiffness(u)) / u.cwiseProduct(disc.weight()).dot(u);
  CHECK(q == doctest::Approx(mode.lambda).epsilon(0.02));
}

TEST_CASE("fields export as CSV") {
  std::ostringstream os;
  write_csv(os, ScalarField(build_radial_grid(3, 1.0, 8), VectorXd::Ones(8)));
  CHECK(os.str().rfind("r,value\n0,1\n", 0) == 0);
  std::ostringstream box;
  write_csv(box, ScalarField(build_box_grid(1.0, 8), VectorXd::Zero(512)));
  CHECK(box.str().rfind("x,y,z,value\n", 0) == 0);
}

}  // TEST_SUITE
