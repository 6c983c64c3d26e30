// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qomega;

namespace {

const double kPi = std::numbers::pi;

Domain two_balls(double d) {
  return Domain::union_of_balls({Ball{Vector3d(-d, 0, 0), 1.0}, Ball{Vector3d(d, 0, 0), 1.0}});
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("indicator on the reference shapes") {
  const Domain ball = Domain::ball(3, 1.0);
  CHECK(indicator(ball, Vector3d(0, 0, 0)) == 1);
  CHECK(indicator(ball, Vector3d(2, 0, 0)) == -1);
  CHECK(indicator(Domain::annulus(3, 1.0, 2.0), Vector3d(1.5, 0, 0)) == 1);
  CHECK(indicator(Domain::annulus(3, 1.0, 2.0), Vector3d(0.5, 0, 0)) == -1);
}

TEST_CASE("boundary points belong to the complement") {
  CHECK(indicator(Domain::ball(3, 1.0), Vector3d(1, 0, 0)) == -1);
  CHECK(indicator(Domain::annulus(3, 1.0, 2.0), Vector3d(0, 2, 0)) == -1);
  const Domain box = Domain::box(Vector3d::Zero(), Vector3d(1, 2, 3));
  CHECK(indicator(box, Vector3d(1, 0, 0)) == -1);
  CHECK(indicator(box, Vector3d(0.99, 1.99, 2.99)) == 1);
}

TEST_CASE("scale multiplies centers and lengths") {
  const Domain b2 = scale(Domain::ball(3, 1.0), 2.0);
  CHECK(b2.as<Ball>().radius == doctest::Approx(2.0));
  CHECK(scale(Domain::ball(3, 1.0), 1.0).as<Ball>().radius == 1.0);
  const Domain a = scale(Domain::annulus(3, 1.0, 2.0), 0.5);
  CHECK(a.as<Annulus>().r_in == doctest::Approx(0.5));
  CHECK(a.as<Annulus>().r_out == doctest::Approx(1.0));
  const Domain shifted = scale(Domain::ball(Vector3d(1, 2, 3), 1.0), 3.0);
  CHECK((shifted.as<Ball>().center - VectorXd(Vector3d(3, 6, 9))).norm() < 1e-14);
  CHECK_THROWS_AS(scale(Domain::ball(3, 1.0), 0.0), Error);
  CHECK_THROWS_AS(scale(Domain::ball(3, 1.0), -1.0), Error);
}

TEST_CASE("closed-form volumes") {
  CHECK(volume(Domain::ball(3, 1.0)) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-15));
  CHECK(volume(Domain::box(Vector3d::Zero(), Vector3d(1, 1, 1))) == doctest::Approx(8.0));
  CHECK(volume(Domain::annulus(3, 1.0, 2.0)) == doctest::Approx(4.0 * kPi / 3.0 * 7.0));
  CHECK(volume(two_balls(3.0)) == doctest::Approx(8.0 * kPi / 3.0));
}

TEST_CASE("overlapping unions need the overlap flag") {
  CHECK_THROWS_AS(two_balls(0.5), Error);
  const Domain ok = Domain::union_of_balls(
      {Ball{Vector3d(-0.5, 0, 0), 1.0}, Ball{Vector3d(0.5, 0, 0), 1.0}}, true);
  CHECK(ok.is<UnionOfBalls>());
  CHECK_THROWS_AS(volume(ok), Error);
}

TEST_CASE("invalid shapes are rejected") {
  CHECK_THROWS_AS(Domain::ball(3, 0.0), Error);
  CHECK_THROWS_AS(Domain::annulus(3, 2.0, 1.0), Error);
  CHECK_THROWS_AS(Domain::box(Vector3d::Zero(), Vector3d(1, 0, 1)), Error);
  CHECK_THROWS_AS(Domain::ball(2, 1.0), Error);
}

TEST_CASE("schwarz ball has the same measure") {
  CHECK(schwarz_ball(Domain::ball(Vector3d(3, -1, 2), 1.0)).as<Ball>().radius ==
        doctest::Approx(1.0));
  CHECK(schwarz_ball(Domain::annulus(3, 1.0, 2.0)).as<Ball>().radius ==
        doctest::Approx(std::cbrt(7.0)).epsilon(1e-14));
  CHECK(schwarz_ball(two_balls(3.0)).as<Ball>().radius ==
        doctest::Approx(std::cbrt(2.0)).epsilon(1e-14));
  const Domain star = schwarz_ball(two_balls(3.0));
  CHECK(star.is_centered_radial());
  CHECK(volume(star) == doctest::Approx(volume(two_balls(3.0))).epsilon(1e-12));
}

TEST_CASE("scaling laws on random samples") {
  CounterRng rng(3);
  const std::vector<Domain> shapes = {Domain::ball(Vector3d(0.3, 0, 0), 1.0),
                                      Domain::annulus(3, 1.0, 2.0), two_balls(3.0),
                                      Domain::box(Vector3d(0, 1, 0), Vector3d(1, 2, 0.5))};
  for (const Domain& d : shapes) {
    for (int trial = 0; trial < 20; ++trial) {
      const double t = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
      const Domain s = scale(d, t);
      CHECK(volume(s) == doctest::Approx(t * t * t * volume(d)).epsilon(1e-12));
      const Vector3d x(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
      if (std::abs(signed_distance(d, x)) > 1e-9) CHECK(indicator(s, Vector3d(t * x)) == indicator(d, x));
    }
  }
}

TEST_CASE("indicator is never zero") {
  CounterRng rng(5);
  const Domain d = Domain::annulus(3, 1.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const Vector3d x(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
    const int q = indicator(d, x);
    CHECK((q == 1 || q == -1));
  }
}

TEST_CASE("circumscribing radius and centroid") {
  CHECK(two_balls(3.0).circumscribing_radius() == doctest::Approx(4.0));
  CHECK(two_balls(3.0).centroid().norm() < 1e-14);
  CHECK(Domain::ball(Vector3d(1, 0, 0), 0.5).circumscribing_radius() == doctest::Approx(1.5));
  CHECK(Domain::annulus(3, 1.0, 2.0).is_centered_radial());
  CHECK_FALSE(Domain::ball(Vector3d(1, 0, 0), 0.5).is_centered_radial());
}

}  // TEST_SUITE
