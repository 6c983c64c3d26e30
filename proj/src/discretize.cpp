// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/discretize.hpp"

#include "qomega/linear_operator.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace qomega {

namespace {

SparseMatrix assemble_radial_stiffness(const RadialGrid& g) {
  const double delta = g.delta();
  const double omega = unit_sphere_area(g.dim);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(3 * g.m));
  for (int j = 0; j < g.m; ++j) {
    const double right = omega * std::pow((j + 0.5) * delta, g.dim - 1) / delta;
    const double left = j > 0 ? omega * std::pow((j - 0.5) * delta, g.dim - 1) / delta : 0.0;
    t.emplace_back(j, j, left + right);
    if (j + 1 < g.m) {
      t.emplace_back(j, j + 1, -right);
      t.emplace_back(j + 1, j, -right);
    }
  }
  SparseMatrix a(g.m, g.m);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

std::pair<double, double> radial_cell(const RadialGrid& g, Index j) {
  const double delta = g.delta();
  return {std::max(0.0, (static_cast<double>(j) - 0.5) * delta),
          (static_cast<double>(j) + 0.5) * delta};
}

// Axis-aligned bounding box of the closed domain.
std::pair<VectorXd, VectorXd> bounding_box(const Domain& domain) {
  return std::visit(
      [](const auto& s) -> std::pair<VectorXd, VectorXd> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          return {s.center.array() - s.radius, s.center.array() + s.radius};
        } else if constexpr (std::is_same_v<S, Annulus>) {
          return {s.center.array() - s.r_out, s.center.array() + s.r_out};
        } else if constexpr (std::is_same_v<S, UnionOfBalls>) {
          VectorXd lo = s.balls.front().center.array() - s.balls.front().radius;
          VectorXd hi = s.balls.front().center.array() + s.balls.front().radius;
          for (const auto& b : s.balls) {
            lo = lo.cwiseMin((b.center.array() - b.radius).matrix());
            hi = hi.cwiseMax((b.center.array() + b.radius).matrix());
          }
          return {lo, hi};
        } else {
          return {s.center - s.half_widths, s.center + s.half_widths};
        }
      },
      domain.shape());
}

VectorXd box_weight_fraction(const BoxGrid& g, const Domain& domain) {
  require(domain.dim() == 3, ErrorKind::invalid_parameter, "box grids are three-dimensional");
  const auto [lo, hi] = bounding_box(domain);
  const Vector3d box_lo = g.center - g.half_widths();
  const Vector3d box_hi = g.center + g.half_widths();
  require((lo.array() > box_lo.array()).all() && (hi.array() < box_hi.array()).all(),
          ErrorKind::invalid_parameter, "domain escapes the grid box");

  constexpr int kSub = 4;
  const double h = g.h;
  const double straddle = 0.5 * std::sqrt(3.0) * h;
  VectorXd q(g.size());
  for (Index idx = 0; idx < g.size(); ++idx) {
    const Vector3d x = g.node(idx);
    const double sd = signed_distance(domain, x);
    if (std::abs(sd) >= straddle) {
      q[idx] = sd < 0.0 ? 1.0 : -1.0;
      continue;
    }
    int sum = 0;
    for (int c = 0; c < kSub; ++c)
      for (int b = 0; b < kSub; ++b)
        for (int a = 0; a < kSub; ++a) {
          const Vector3d off((a + 0.5) / kSub - 0.5, (b + 0.5) / kSub - 0.5,
                             (c + 0.5) / kSub - 0.5);
          sum += indicator(domain, (x + h * off).eval());
        }
    q[idx] = static_cast<double>(sum) / (kSub * kSub * kSub);
  }
  return q;
}

VectorXd radial_weight_fraction(const RadialGrid& g, const Domain& domain) {
  require(domain.is_centered_radial(), ErrorKind::invalid_parameter,
          "radial grids need a ball or annulus centered at the origin");
  require(domain.dim() == g.dim, ErrorKind::invalid_parameter, "dimension mismatch");
  const auto intervals = domain.radial_intervals();
  for (const auto& [a, b] : intervals)
    require(b < g.r_max, ErrorKind::invalid_parameter, "domain escapes the radial grid");
  const int n = g.dim;
  VectorXd q(g.m);
  for (Index j = 0; j < g.m; ++j) {
    const auto [lo, hi] = radial_cell(g, j);
    const double total = std::pow(hi, n) - std::pow(lo, n);
    double inside = 0.0;
    for (const auto& [a, b] : intervals) {
      const double s = std::max(a, lo), e = std::min(b, hi);
      if (e > s) inside += std::pow(e, n) - std::pow(s, n);
    }
    q[j] = 2.0 * inside / total - 1.0;
  }
  return q;
}

}  // namespace

SparseMatrix assemble_stiffness(const Grid& grid) {
  if (const auto* g = std::get_if<BoxGrid>(&grid)) return assemble_box_stiffness(g->n, g->h);
  return assemble_radial_stiffness(std::get<RadialGrid>(grid));
}

VectorXd assemble_mass(const Grid& grid) {
  if (const auto* g = std::get_if<BoxGrid>(&grid))
    return VectorXd::Constant(g->size(), g->h * g->h * g->h);
  const auto& g = std::get<RadialGrid>(grid);
  const double c = unit_sphere_area(g.dim) / g.dim;
  VectorXd w(g.m);
  for (Index j = 0; j < g.m; ++j) {
    const auto [lo, hi] = radial_cell(g, j);
    w[j] = c * (std::pow(hi, g.dim) - std::pow(lo, g.dim));
  }
  return w;
}

VectorXd assemble_weight_fraction(const Grid& grid, const Domain& domain) {
  if (const auto* g = std::get_if<BoxGrid>(&grid)) return box_weight_fraction(*g, domain);
  return radial_weight_fraction(std::get<RadialGrid>(grid), domain);
}

VectorXd assemble_weight(const Grid& grid, const Domain& domain) {
  return assemble_weight_fraction(grid, domain).cwiseProduct(assemble_mass(grid));
}

struct Discretization::Core {
  SparseMatrix matrix;
  Eigen::SimplicialLLT<SparseMatrix> llt;
  bool direct = false;
  std::unique_ptr<BoxMultigrid> multigrid;
};

Discretization Discretization::box(const BoxGrid& grid, const Domain& domain) {
  Discretization d;
  d.grid_ = grid;
  d.domain_ = domain;
  d.mass_ = assemble_mass(d.grid_);
  d.weight_ = assemble_weight_fraction(d.grid_, domain).cwiseProduct(d.mass_);
  auto core = std::make_shared<Core>();
  if (grid.size() <= kDirectLimit) {
    core->matrix = assemble_box_stiffness(grid.n, grid.h);
    core->llt.compute(core->matrix);
    require(core->llt.info() == Eigen::Success, ErrorKind::assembly,
            "Cholesky factorization of the stiffness failed");
    core->direct = true;
  } else {
    core->multigrid = std::make_unique<BoxMultigrid>(grid);
  }
  d.core_ = std::move(core);
  return d;
}

Discretization Discretization::radial(const RadialGrid& grid, const Domain& domain) {
  Discretization d;
  d.grid_ = grid;
  d.domain_ = domain;
  d.mass_ = assemble_mass(d.grid_);
  d.weight_ = assemble_weight_fraction(d.grid_, domain).cwiseProduct(d.mass_);
  auto core = std::make_shared<Core>();
  core->matrix = assemble_radial_stiffness(grid);
  core->llt.compute(core->matrix);
  require(core->llt.info() == Eigen::Success, ErrorKind::assembly,
          "Cholesky factorization of the stiffness failed");
  core->direct = true;
  d.core_ = std::move(core);
  return d;
}

Discretization Discretization::make(const Grid& grid, const Domain& domain) {
  if (const auto* g = std::get_if<BoxGrid>(&grid)) return box(*g, domain);
  return radial(std::get<RadialGrid>(grid), domain);
}

Discretization Discretization::with_weight(VectorXd weight) const {
  require(weight.size() == size(), ErrorKind::invalid_parameter, "weight size mismatch");
  Discretization d = *this;
  d.weight_ = std::move(weight);
  return d;
}

void Discretization::apply_stiffness(const VectorXd& x, VectorXd& y) const {
  if (const auto* g = std::get_if<BoxGrid>(&grid_)) {
    apply_box_stiffness(g->n, g->h, x, y);
  } else {
    y.noalias() = core_->matrix * x;
  }
}

VectorXd Discretization::apply_stiffness(const VectorXd& x) const {
  VectorXd y;
  apply_stiffness(x, y);
  return y;
}

void Discretization::precondition(const VectorXd& r, VectorXd& z) const {
  if (core_->direct) {
    z = core_->llt.solve(r);
  } else {
    core_->multigrid->apply(r, z);
  }
}

bool Discretization::has_exact_inverse() const { return core_->direct; }

VectorXd Discretization::solve_stiffness(const VectorXd& b, double tol) const {
  if (core_->direct) return core_->llt.solve(b);
  const LinearOperator op(size(), [this](const VectorXd& x, VectorXd& y) { apply_stiffness(x, y); });
  const auto res = solve_cg(
      op, [this](const VectorXd& r, VectorXd& z) { precondition(r, z); }, b, tol, 200);
  require(res.converged, ErrorKind::convergence, "stiffness solve did not converge");
  return res.x;
}

SparseMatrix Discretization::stiffness_matrix() const {
  if (core_->direct) return core_->matrix;
  return assemble_stiffness(grid_);
}

Index Discretization::nearest_node(const VectorXd& x) const {
  if (const auto* g = std::get_if<BoxGrid>(&grid_)) {
    const Vector3d lo = g->center - g->half_widths();
    Eigen::Array3i c;
    for (int a = 0; a < 3; ++a) {
      const long i = std::lround((x[a] - lo[a]) / g->h) - 1;
      c[a] = static_cast<int>(std::clamp<long>(i, 0, g->n[a] - 1));
    }
    return g->index(c[0], c[1], c[2]);
  }
  const auto& g = std::get<RadialGrid>(grid_);
  const long j = std::lround(x.norm() / g.delta());
  return std::clamp<long>(j, 0, g.m - 1);
}

VectorXd masked_weight(const Discretization& disc, const std::function<bool(Index)>& keep) {
  VectorXd w = disc.weight();
  for (Index i = 0; i < w.size(); ++i)
    if (!keep(i)) w[i] = -disc.mass()[i];
  return w;
}

std::pair<VectorXd, VectorXd> gauss_legendre(int n) {
  require(n >= 1, ErrorKind::invalid_parameter, "need at least one quadrature node");
  MatrixXd jacobi = MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(jacobi);
  VectorXd nodes = es.eigenvalues();
  VectorXd weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  return {nodes, weights};
}

namespace {

struct Sphere {
  VectorXd center;
  double radius;
  double orientation;  // +1 outward from the center, -1 toward it
};

std::vector<Sphere> boundary_spheres(const Domain& domain) {
  return std::visit(
      [](const auto& s) -> std::vector<Sphere> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          return {{s.center, s.radius, 1.0}};
        } else if constexpr (std::is_same_v<S, Annulus>) {
          return {{s.center, s.r_out, 1.0}, {s.center, s.r_in, -1.0}};
        } else if constexpr (std::is_same_v<S, UnionOfBalls>) {
          require(!s.allow_overlap, ErrorKind::unsupported_shape,
                  "surface quadrature needs disjoint balls");
          std::vector<Sphere> out;
          for (const auto& b : s.balls) out.push_back({b.center, b.radius, 1.0});
          return out;
        } else {
          fail(ErrorKind::unsupported_shape, "surface quadrature needs sphere-bounded domains");
        }
      },
      domain.shape());
}

}  // namespace

double surface_quadrature(const Domain& domain, const ScalarField& field,
                          const std::function<double(double)>& integrand) {
  const auto spheres = boundary_spheres(domain);
  const auto f = [&](double s) { return integrand ? integrand(s) : s; };
  double total = 0.0;
  if (const auto* g = std::get_if<RadialGrid>(&field.grid)) {
    require(domain.is_centered_radial(), ErrorKind::invalid_parameter,
            "radial fields need a centered radial domain");
    const double omega = unit_sphere_area(g->dim);
    for (const auto& s : spheres) {
      const double value = f(interpolate_radial(*g, field.values, s.radius));
      total += s.orientation * s.radius * omega * std::pow(s.radius, g->dim - 1) * value;
    }
    return total;
  }
  const auto& g = std::get<BoxGrid>(field.grid);
  require(domain.dim() == 3, ErrorKind::invalid_parameter, "box fields are three-dimensional");
  for (const auto& s : spheres) {
    const int nt = std::max(32, static_cast<int>(std::ceil(2.0 * std::numbers::pi * s.radius / g.h)));
    const int nphi = 2 * nt;
    const auto [t, wt] = gauss_legendre(nt);
    const double dphi = 2.0 * std::numbers::pi / nphi;
    const Vector3d c = s.center.head<3>();
    double acc = 0.0;
    for (int a = 0; a < nt; ++a) {
      const double sin_t = std::sqrt(std::max(0.0, 1.0 - t[a] * t[a]));
      for (int b = 0; b < nphi; ++b) {
        const double phi = (b + 0.5) * dphi;
        const Vector3d nrm(sin_t * std::cos(phi), sin_t * std::sin(phi), t[a]);
        const Vector3d x = c + s.radius * nrm;
        const double zeta_nu = s.orientation * (s.radius + c.dot(nrm));
        acc += wt[a] * f(interpolate_linear(g, field.values, x)) * zeta_nu;
      }
    }
    total += acc * dphi * s.radius * s.radius;
  }
  return total;
}

}  // namespace qomega
