// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/geometry.hpp"

#include <sstream>

namespace qomega {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::unsupported_shape: return "unsupported-shape";
    case ErrorKind::assembly: return "assembly-error";
    case ErrorKind::partial_result: return "partial-result";
    case ErrorKind::bracket: return "bracket-error";
    case ErrorKind::convergence: return "convergence-failure";
    case ErrorKind::line_search: return "line-search-failure";
    case ErrorKind::singular_jacobian: return "singular-jacobian";
    case ErrorKind::insufficient_window: return "insufficient-window";
    case ErrorKind::unsupported_model: return "unsupported-model";
    case ErrorKind::axis_undetermined: return "axis-undetermined";
    case ErrorKind::config: return "config-error";
    case ErrorKind::unknown_key: return "unknown-key";
    case ErrorKind::parse: return "parse-error";
    case ErrorKind::io: return "io-error";
  }
  return "unknown";
}

Domain Domain::ball(const VectorXd& center, double radius) {
  Domain d(static_cast<int>(center.size()), Ball{center, radius});
  d.validate();
  return d;
}

Domain Domain::ball(int dim, double radius) { return ball(VectorXd::Zero(dim), radius); }

Domain Domain::annulus(const VectorXd& center, double r_in, double r_out) {
  Domain d(static_cast<int>(center.size()), Annulus{center, r_in, r_out});
  d.validate();
  return d;
}

Domain Domain::annulus(int dim, double r_in, double r_out) {
  return annulus(VectorXd::Zero(dim), r_in, r_out);
}

Domain Domain::union_of_balls(std::vector<Ball> balls, bool allow_overlap) {
  require(!balls.empty(), ErrorKind::invalid_parameter, "union of balls needs at least one ball");
  const int dim = static_cast<int>(balls.front().center.size());
  Domain d(dim, UnionOfBalls{std::move(balls), allow_overlap});
  d.validate();
  return d;
}

Domain Domain::box(const VectorXd& center, const VectorXd& half_widths) {
  Domain d(static_cast<int>(center.size()), Box{center, half_widths});
  d.validate();
  return d;
}

void Domain::validate() const {
  require(dim_ >= 3, ErrorKind::invalid_parameter, "dimension must be at least 3");
  auto check_center = [&](const VectorXd& c) {
    require(c.size() == dim_, ErrorKind::invalid_parameter, "center has wrong dimension");
    require(c.allFinite(), ErrorKind::invalid_parameter, "center must be finite");
  };
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          check_center(s.center);
          require(s.radius > 0.0 && std::isfinite(s.radius), ErrorKind::invalid_parameter,
                  "ball radius must be positive");
        } else if constexpr (std::is_same_v<S, Annulus>) {
          check_center(s.center);
          require(s.r_in > 0.0 && s.r_in < s.r_out && std::isfinite(s.r_out),
                  ErrorKind::invalid_parameter, "annulus needs 0 < r_in < r_out");
        } else if constexpr (std::is_same_v<S, UnionOfBalls>) {
          for (const auto& b : s.balls) {
            check_center(b.center);
            require(b.radius > 0.0 && std::isfinite(b.radius), ErrorKind::invalid_parameter,
                    "ball radius must be positive");
          }
          if (!s.allow_overlap) {
            for (std::size_t i = 0; i < s.balls.size(); ++i)
              for (std::size_t j = i + 1; j < s.balls.size(); ++j) {
                const double dist = (s.balls[i].center - s.balls[j].center).norm();
                require(dist > s.balls[i].radius + s.balls[j].radius,
                        ErrorKind::invalid_parameter,
                        "union members overlap; set allow_overlap to accept");
              }
          }
        } else {
          check_center(s.center);
          require(s.half_widths.size() == dim_ && (s.half_widths.array() > 0.0).all(),
                  ErrorKind::invalid_parameter, "box half-widths must be positive");
        }
      },
      shape_);
}

bool Domain::is_centered_radial(double tol) const {
  if (const auto* b = std::get_if<Ball>(&shape_)) return b->center.norm() <= tol;
  if (const auto* a = std::get_if<Annulus>(&shape_)) return a->center.norm() <= tol;
  return false;
}

double Domain::circumscribing_radius() const {
  return std::visit(
      [](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          return s.center.norm() + s.radius;
        } else if constexpr (std::is_same_v<S, Annulus>) {
          return s.center.norm() + s.r_out;
        } else if constexpr (std::is_same_v<S, UnionOfBalls>) {
          double r = 0.0;
          for (const auto& b : s.balls) r = std::max(r, b.center.norm() + b.radius);
          return r;
        } else {
          return (s.center.cwiseAbs() + s.half_widths).norm();
        }
      },
      shape_);
}

VectorXd Domain::centroid() const {
  return std::visit(
      [&](const auto& s) -> VectorXd {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UnionOfBalls>) {
          VectorXd c = VectorXd::Zero(dim_);
          double total = 0.0;
          for (const auto& b : s.balls) {
            const double w = std::pow(b.radius, dim_);
            c += w * b.center;
            total += w;
          }
          return c / total;
        } else {
          return s.center;
        }
      },
      shape_);
}

std::vector<std::pair<double, double>> Domain::radial_intervals() const {
  if (const auto* b = std::get_if<Ball>(&shape_)) return {{0.0, b->radius}};
  if (const auto* a = std::get_if<Annulus>(&shape_)) return {{a->r_in, a->r_out}};
  fail(ErrorKind::unsupported_shape, "radial intervals need a ball or an annulus");
}

std::string Domain::describe() const {
  std::ostringstream os;
  os.precision(17);
  auto point = [&](const VectorXd& c) {
    os << '(';
    for (Index i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << ')';
  };
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          os << "Ball(";
          point(s.center);
          os << ", " << s.radius << ')';
        } else if constexpr (std::is_same_v<S, Annulus>) {
          os << "Annulus(";
          point(s.center);
          os << ", " << s.r_in << ", " << s.r_out << ')';
        } else if constexpr (std::is_same_v<S, UnionOfBalls>) {
          os << "UnionOfBalls{";
          for (std::size_t i = 0; i < s.balls.size(); ++i) {
            os << (i ? ", " : "") << '(';
            point(s.balls[i].center);
            os << ", " << s.balls[i].radius << ')';
          }
          os << '}';
        } else {
          os << "Box(";
          point(s.center);
          os << ", ";
          point(s.half_widths);
          os << ')';
        }
      },
      shape_);
  return os.str();
}

Domain scale(const Domain& domain, double t) {
  require(t > 0.0 && std::isfinite(t), ErrorKind::invalid_parameter, "scale factor must be positive");
  return std::visit(
      [&](const auto& s) -> Domain {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          return Domain::ball(t * s.center, t * s.radius);
        } else if constexpr (std::is_same_v<S, Annulus>) {
          return Domain::annulus(t * s.center, t * s.r_in, t * s.r_out);
        } else if constexpr (std::is_same_v<S, UnionOfBalls>) {
          std::vector<Ball> balls;
          for (const auto& b : s.balls) balls.push_back({t * b.center, t * b.radius});
          return Domain::union_of_balls(std::move(balls), s.allow_overlap);
        } else {
          return Domain::box(t * s.center, t * s.half_widths);
        }
      },
      domain.shape());
}

double volume(const Domain& domain) {
  const int n = domain.dim();
  const double unit = unit_ball_volume(n);
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          return unit * std::pow(s.radius, n);
        } else if constexpr (std::is_same_v<S, Annulus>) {
          return unit * (std::pow(s.r_out, n) - std::pow(s.r_in, n));
        } else if constexpr (std::is_same_v<S, UnionOfBalls>) {
          require(!s.allow_overlap || s.balls.size() == 1, ErrorKind::invalid_parameter,
                  "volume of an overlapping union has no closed form");
          double v = 0.0;
          for (const auto& b : s.balls) v += unit * std::pow(b.radius, n);
          return v;
        } else {
          return std::pow(2.0, n) * s.half_widths.prod();
        }
      },
      domain.shape());
}

double ball_radius_for_volume(int dim, double vol) {
  return std::pow(vol / unit_ball_volume(dim), 1.0 / dim);
}

Domain schwarz_ball(const Domain& domain) {
  return Domain::ball(domain.dim(), ball_radius_for_volume(domain.dim(), volume(domain)));
}

}  // namespace qomega
