// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef QOMEGA_GEOMETRY_HPP
#define QOMEGA_GEOMETRY_HPP

#include "qomega/common.hpp"

#include <algorithm>
#include <limits>
#include <variant>
#include <vector>

namespace qomega {

struct Ball {
  VectorXd center;
  double radius = 1.0;
};

struct Annulus {
  VectorXd center;
  double r_in = 1.0;
  double r_out = 2.0;
};

struct UnionOfBalls {
  std::vector<Ball> balls;
  bool allow_overlap = false;
};

struct Box {
  VectorXd center;
  VectorXd half_widths;
};

using Shape = std::variant<Ball, Annulus, UnionOfBalls, Box>;

/// A bounded open set in R^N drawn from a closed family of shapes. The weight
/// Q equals +1 on the set and -1 on its closed complement.
class Domain {
 public:
  Domain() = default;

  static Domain ball(const VectorXd& center, double radius);
  static Domain ball(int dim, double radius);
  static Domain annulus(const VectorXd& center, double r_in, double r_out);
  static Domain annulus(int dim, double r_in, double r_out);
  static Domain union_of_balls(std::vector<Ball> balls, bool allow_overlap = false);
  static Domain box(const VectorXd& center, const VectorXd& half_widths);

  int dim() const { return dim_; }
  const Shape& shape() const { return shape_; }

  template <typename T>
  bool is() const { return std::holds_alternative<T>(shape_); }

  template <typename T>
  const T& as() const { return std::get<T>(shape_); }

  /// Ball or annulus centered at the origin.
  bool is_centered_radial(double tol = 1e-14) const;

  /// Smallest R with the domain contained in the closed ball B_R(0).
  double circumscribing_radius() const;

  /// Center of mass of the indicator.
  VectorXd centroid() const;

  /// Pairs of disjoint interface radii (a, b) such that the set is
  /// {a < |x - c| < b}. Only for balls and annuli.
  std::vector<std::pair<double, double>> radial_intervals() const;

  std::string describe() const;

 private:
  Domain(int dim, Shape shape) : dim_(dim), shape_(std::move(shape)) {}
  void validate() const;

  int dim_ = 3;
  Shape shape_;
};

/// Signed distance (negative inside). Exact for balls, annuli and boxes;
/// for unions it is the minimum over members, which is exact when disjoint.
template <typename Derived>
double signed_distance(const Domain& domain, const Eigen::MatrixBase<Derived>& x) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          return (x - s.center).norm() - s.radius;
        } else if constexpr (std::is_same_v<S, Annulus>) {
          const double r = (x - s.center).norm();
          return std::max(s.r_in - r, r - s.r_out);
        } else if constexpr (std::is_same_v<S, UnionOfBalls>) {
          double d = std::numeric_limits<double>::infinity();
          for (const auto& b : s.balls) d = std::min(d, (x - b.center).norm() - b.radius);
          return d;
        } else {
          const VectorXd q = (x - s.center).cwiseAbs() - s.half_widths;
          const double outside = q.cwiseMax(0.0).norm();
          const double inside = std::min(q.maxCoeff(), 0.0);
          return outside + inside;
        }
      },
      domain.shape());
}

/// +1 for x in the open set, -1 otherwise; boundary points get -1.
template <typename Derived>
int indicator(const Domain& domain, const Eigen::MatrixBase<Derived>& x) {
  return std::visit(
      [&](const auto& s) -> int {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          return (x - s.center).squaredNorm() < s.radius * s.radius ? 1 : -1;
        } else if constexpr (std::is_same_v<S, Annulus>) {
          const double r2 = (x - s.center).squaredNorm();
          return (r2 > s.r_in * s.r_in && r2 < s.r_out * s.r_out) ? 1 : -1;
        } else if constexpr (std::is_same_v<S, UnionOfBalls>) {
          for (const auto& b : s.balls)
            if ((x - b.center).squaredNorm() < b.radius * b.radius) return 1;
          return -1;
        } else {
          for (Index i = 0; i < x.size(); ++i)
            if (!(std::abs(x[i] - s.center[i]) < s.half_widths[i])) return -1;
          return 1;
        }
      },
      domain.shape());
}

/// t * domain: centers and lengths multiplied by t.
Domain scale(const Domain& domain, double t);

/// Lebesgue measure, closed form.
double volume(const Domain& domain);

/// The origin-centered ball with the same measure.
Domain schwarz_ball(const Domain& domain);

/// Radius of the ball of measure `vol` in R^N.
double ball_radius_for_volume(int dim, double vol);

}  // namespace qomega

#endif  // QOMEGA_GEOMETRY_HPP
