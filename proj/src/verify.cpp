// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/verify.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace qomega {

// ---- constants --------------------------------------------------------------

double decay_constant_cp(double p, int dim) {
  require(p > 2.0, ErrorKind::invalid_parameter, "C_p needs p > 2");
  const double base = (4.0 * p - 2.0 * dim * (p - 2.0) - 4.0) / ((p - 2.0) * (p - 2.0));
  require(base > 0.0, ErrorKind::invalid_parameter, "C_p needs p below the Serrin exponent");
  return std::pow(base, 1.0 / (p - 2.0));
}

double decay_constant_cq(double q, int dim) {
  require(q > 2.0, ErrorKind::invalid_parameter, "c_q needs q > 2");
  return 2.0 * (q - (q - 2.0) * (dim - 1.0)) / ((q - 2.0) * (q - 2.0));
}

double serrin_constant_small(int dim) {
  const double n = dim;
  return std::pow(2.0, 2.0 - n) * std::pow(3.0 * n * n - 10.0 * n + 8.0, 0.5 * (n - 2.0));
}

double serrin_constant_large(int dim) {
  const double n = dim;
  return std::pow(2.0, 0.5 * (2.0 - n)) * std::pow(n - 2.0, n - 2.0);
}

const char* to_string(DecayModel model) {
  switch (model) {
    case DecayModel::linear_exp: return "linear_exp";
    case DecayModel::power: return "power";
    case DecayModel::serrin_log: return "serrin_log";
  }
  return "unknown";
}

const char* to_string(ComparisonKind kind) {
  switch (kind) {
    case ComparisonKind::faber_krahn: return "faber_krahn";
    case ComparisonKind::hks: return "hks";
    case ComparisonKind::second_bound: return "second_bound";
    case ComparisonKind::scaling: return "scaling";
    case ComparisonKind::monotonicity: return "monotonicity";
  }
  return "unknown";
}

// ---- decay fits ---------------------------------------------------------------

namespace {

double median(std::vector<double> v) {
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  const double hi = v[m];
  if (v.size() % 2) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m)));
}

Vector3d center3(const VectorXd& c) {
  if (c.size() == 0) return Vector3d::Zero();
  return c.head<3>();
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

// Decaying fit: slope <= 0; a growing trend collapses to the constant model.
LineFit fit_decay(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f = fit_line(x, y);
  if (f.slope > 0.0) {
    f.intercept = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    f.slope = 0.0;
    f.r_squared = 0.0;
  }
  return f;
}

}  // namespace

double contamination_radius(const Grid& grid, const VectorXd& center) {
  if (const auto* g = std::get_if<BoxGrid>(&grid)) {
    const Vector3d c = center3(center);
    const Vector3d lo = g->center - g->half_widths();
    const Vector3d hi = g->center + g->half_widths();
    const double reach = std::min((c - lo).minCoeff(), (hi - c).minCoeff());
    return reach - 5.0 * g->h;
  }
  const auto& g = std::get<RadialGrid>(grid);
  return g.r_max - 5.0 * g.delta();
}

ShellSamples shell_medians(const ScalarField& field, const VectorXd& center, double r_lo,
                           double r_hi, const std::function<double(double, double)>& transform,
                           double floor_rel) {
  ShellSamples out;
  const double floor = floor_rel * field.sup_norm();
  if (const auto* g = std::get_if<RadialGrid>(&field.grid)) {
    for (Index j = 0; j < g->m; ++j) {
      const double r = g->radius(j);
      const double v = field.values[j];
      if (r < r_lo || r > r_hi || !(std::abs(v) > floor)) continue;
      out.r.push_back(r);
      out.value.push_back(transform(v, r));
    }
    return out;
  }
  const auto& g = std::get<BoxGrid>(field.grid);
  const Vector3d c = center3(center);
  std::map<long, std::pair<std::vector<double>, std::vector<double>>> shells;
  for (Index i = 0; i < g.size(); ++i) {
    const double r = (g.node(i) - c).norm();
    const double v = field.values[i];
    if (r < r_lo || r > r_hi || !(std::abs(v) > floor)) continue;
    auto& s = shells[static_cast<long>(std::floor(r / g.h))];
    s.first.push_back(r);
    s.second.push_back(transform(v, r));
  }
  for (auto& [key, s] : shells) {
    if (s.first.size() < 3) continue;
    out.r.push_back(median(s.first));
    out.value.push_back(median(s.second));
  }
  return out;
}

FitReport fit_linear_decay(const ScalarField& phi, double lambda, double r_lo, double r_hi,
                           const VectorXd& center) {
  require(lambda > 0.0, ErrorKind::invalid_parameter, "eigenvalue must be positive");
  require(r_hi > r_lo && r_lo >= 0.0, ErrorKind::invalid_parameter, "empty fit window");
  const int dim = grid_dim(phi.grid);
  r_hi = std::min(r_hi, contamination_radius(phi.grid, center));
  const double power = 0.5 * (dim - 1.0);
  const ShellSamples s = shell_medians(phi, center, r_lo, r_hi, [power](double v, double r) {
    return std::log(std::abs(v)) + power * std::log(r);
  });
  require(s.r.size() >= 10, ErrorKind::insufficient_window,
          "fewer than 10 shells in the fit window");
  const LineFit f = fit_decay(s.r, s.value);
  FitReport rep;
  rep.model = DecayModel::linear_exp;
  rep.fitted_rate = -f.slope;
  rep.reference_rate = std::sqrt(lambda);
  rep.r_lo = r_lo;
  rep.r_hi = r_hi;
  rep.r_squared = f.r_squared;
  rep.n_samples = static_cast<int>(s.r.size());
  rep.amplitude = std::exp(f.intercept);
  return rep;
}

FitReport fit_semilinear_decay(const GroundState& state, double r_lo, double r_hi,
                               const VectorXd& center) {
  const int dim = grid_dim(state.v.grid);
  const double ps = serrin_exponent(dim);
  require(state.p > 2.0, ErrorKind::unsupported_model, "decay laws are stated for p > 2");
  require(state.p <= ps + 1e-12, ErrorKind::unsupported_model,
          "no decay model above the Serrin exponent");
  require(r_hi > r_lo && r_lo >= 1.0, ErrorKind::insufficient_window,
          "decay windows start at r >= 1");
  r_hi = std::min(r_hi, contamination_radius(state.v.grid, center));
  const bool serrin = std::abs(state.p - ps) <= 1e-12;
  if (serrin) require(r_lo > 1.0, ErrorKind::insufficient_window, "log model needs r > 1");
  const ShellSamples s = shell_medians(state.v, center, r_lo, r_hi,
                                       [](double v, double) { return std::log(std::abs(v)); });
  require(s.r.size() >= 10, ErrorKind::insufficient_window,
          "fewer than 10 shells in the fit window");
  std::vector<double> x(s.r.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = s.r[i];
    x[i] = serrin ? std::log(r * std::sqrt(std::log(r))) : std::log(r);
  }
  const LineFit f = fit_decay(x, s.value);
  FitReport rep;
  rep.model = serrin ? DecayModel::serrin_log : DecayModel::power;
  rep.fitted_rate = -f.slope;
  rep.reference_rate = serrin ? dim - 2.0 : 2.0 / (state.p - 2.0);
  rep.r_lo = r_lo;
  rep.r_hi = r_hi;
  rep.r_squared = f.r_squared;
  rep.n_samples = static_cast<int>(s.r.size());
  rep.amplitude = std::exp(f.intercept + state.log_amp);
  return rep;
}

// ---- nodal domains --------------------------------------------------------------

namespace {

int components(const BoxGrid& g, const std::vector<char>& mask) {
  std::vector<char> seen(mask.size(), 0);
  std::vector<Index> stack;
  int count = 0;
  const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
  for (Index s = 0; s < g.size(); ++s) {
    if (!mask[s] || seen[s]) continue;
    ++count;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index idx = stack.back();
      stack.pop_back();
      const auto c = g.coords(idx);
      const std::array<std::array<int, 3>, 6> nb{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                                  {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
      for (const auto& d : nb) {
        const int i = c[0] + d[0], j = c[1] + d[1], k = c[2] + d[2];
        if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) continue;
        const Index t = g.index(i, j, k);
        if (mask[t] && !seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
      }
    }
  }
  return count;
}

}  // namespace

int count_nodal_domains(const ScalarField& phi, double threshold_rel) {
  const double t = threshold_rel * phi.sup_norm();
  if (const auto* g = std::get_if<RadialGrid>(&phi.grid)) {
    int count = 0, prev = 0;
    for (Index j = 0; j < g->m; ++j) {
      const double v = phi.values[j];
      const int s = v > t ? 1 : (v < -t ? -1 : 0);
      if (s != 0 && s != prev) ++count;
      prev = s;
    }
    return count;
  }
  const auto& g = std::get<BoxGrid>(phi.grid);
  std::vector<char> pos(static_cast<std::size_t>(g.size())), neg(static_cast<std::size_t>(g.size()));
  for (Index i = 0; i < g.size(); ++i) {
    pos[i] = phi.values[i] > t;
    neg[i] = phi.values[i] < -t;
  }
  return components(g, pos) + components(g, neg);
}

// ---- symmetry ------------------------------------------------------------------------

namespace {

double default_symmetry_radius(const BoxGrid& g, const Domain& domain) {
  const double reach = g.half_widths().minCoeff() - 2.0 * g.h;
  return std::min(reach, 2.0 * domain.circumscribing_radius() + 1.0);
}

// Max residual of a least-squares fit with the given design rows.
double fit_residual(const MatrixXd& design, const VectorXd& y, VectorXd* coef = nullptr) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
  qr.setThreshold(1e-8);
  const VectorXd c = qr.solve(y);
  if (coef) *coef = c;
  return (design * c - y).cwiseAbs().maxCoeff();
}

}  // namespace

double check_radial(const ScalarField& phi, const Domain& domain, double r_max) {
  require(domain.is_centered_radial(), ErrorKind::invalid_parameter,
          "radial check needs a centered ball or annulus");
  if (std::holds_alternative<RadialGrid>(phi.grid)) return 0.0;
  const auto& g = std::get<BoxGrid>(phi.grid);
  const double sup = phi.sup_norm();
  if (sup == 0.0) return 0.0;
  if (r_max <= 0.0) r_max = default_symmetry_radius(g, domain);
  std::map<long, std::vector<Index>> shells;
  for (Index i = 0; i < g.size(); ++i) {
    const double r = g.node(i).norm();
    if (r <= r_max) shells[static_cast<long>(std::floor(r / g.h))].push_back(i);
  }
  double dev = 0.0;
  for (const auto& [key, nodes] : shells) {
    if (nodes.size() < 4) continue;
    const double rc = (key + 0.5) * g.h;
    MatrixXd design(static_cast<Index>(nodes.size()), 3);
    VectorXd y(static_cast<Index>(nodes.size()));
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      const double d = (g.node(nodes[a]).norm() - rc) / g.h;
      design.row(static_cast<Index>(a)) << 1.0, d, d * d;
      y[static_cast<Index>(a)] = phi.values[nodes[a]];
    }
    dev = std::max(dev, fit_residual(design, y));
  }
  return dev / sup;
}

FoliatedReport check_foliated_schwarz(const ScalarField& phi, const Domain& domain, double r_max,
                                      int directions, std::uint64_t seed) {
  require(domain.is_centered_radial(), ErrorKind::invalid_parameter,
          "foliated Schwarz check needs a centered ball or annulus");
  require(std::holds_alternative<BoxGrid>(phi.grid), ErrorKind::invalid_parameter,
          "foliated Schwarz check needs a box field");
  const auto& g = std::get<BoxGrid>(phi.grid);
  const double sup = phi.sup_norm();
  require(sup > 0.0, ErrorKind::axis_undetermined, "zero field has no axis");
  if (r_max <= 0.0) r_max = default_symmetry_radius(g, domain);

  FoliatedReport rep;
  Vector3d moment = Vector3d::Zero();
  double scale = 0.0;
  Index arg = 0;
  for (Index i = 0; i < g.size(); ++i) {
    const Vector3d x = g.node(i);
    moment += x * phi.values[i];
    scale += x.norm() * std::abs(phi.values[i]);
    if (phi.values[i] > phi.values[arg]) arg = i;
  }
  if (moment.norm() > 1e-6 * scale) {
    rep.axis = moment.normalized();
  } else if (g.node(arg).norm() > g.h) {
    rep.axis = g.node(arg).normalized();
  } else {
    rep.axis = Vector3d::UnitX();
  }

  // (r, cos theta) bins with local quadratic fits
  constexpr int kAngular = 20;
  const double dr = 2.0 * g.h;
  std::map<std::pair<long, int>, std::vector<Index>> bins;
  for (Index i = 0; i < g.size(); ++i) {
    const Vector3d x = g.node(i);
    const double r = x.norm();
    if (r > r_max || r < 2.0 * dr) continue;
    const double t = std::clamp(x.dot(rep.axis) / r, -1.0, 1.0);
    const int tb = std::min(kAngular - 1, static_cast<int>(std::floor((t + 1.0) / 2.0 * kAngular)));
    bins[{static_cast<long>(std::floor(r / dr)), tb}].push_back(i);
  }
  std::map<long, std::map<int, double>> centers;
  for (const auto& [key, nodes] : bins) {
    if (nodes.size() < 12) continue;
    const double rc = (key.first + 0.5) * dr;
    const double tc = (key.second + 0.5) * 2.0 / kAngular - 1.0;
    MatrixXd design(static_cast<Index>(nodes.size()), 6);
    VectorXd y(static_cast<Index>(nodes.size()));
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      const Vector3d x = g.node(nodes[a]);
      const double r = x.norm();
      const double u = (r - rc) / dr;
      const double w = (x.dot(rep.axis) / r - tc) * kAngular;
      design.row(static_cast<Index>(a)) << 1.0, u, w, u * u, u * w, w * w;
      y[static_cast<Index>(a)] = phi.values[nodes[a]];
    }
    VectorXd coef;
    rep.axial_dev = std::max(rep.axial_dev, fit_residual(design, y, &coef));
    VectorXd radial_coef;
    fit_residual(design.leftCols(2), y, &radial_coef);
    centers[key.first][key.second] = radial_coef[0];
  }
  rep.axial_dev /= sup;
  for (const auto& [rb, row] : centers) {
    // increasing polar angle = decreasing cos theta bin
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (auto it = row.rbegin(); it != row.rend(); ++it) {
      if (!std::isnan(prev))
        rep.monotonicity_violation = std::max(rep.monotonicity_violation, it->second - prev);
      prev = it->second;
    }
  }
  rep.monotonicity_violation /= sup;

  CounterRng rng(seed, 29);
  rep.directions = directions;
  for (int d = 0; d < directions; ++d) {
    const Vector3d e = Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized();
    double above = 0.0, below = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
      const Vector3d x = g.node(i);
      const double s = x.dot(e);
      if (s <= 0.0 || x.norm() > r_max) continue;
      const double mirrored = interpolate_cubic(g, phi.values, x - 2.0 * s * e);
      const double diff = phi.values[i] - mirrored;
      above = std::max(above, -diff);
      below = std::max(below, diff);
    }
    rep.reflection_violation = std::max(rep.reflection_violation, std::min(above, below) / sup);
  }
  return rep;
}

// ---- comparisons ------------------------------------------------------------------------------

BoxGrid truncation_grid(const Domain& domain, double lambda, double h, int align,
                        double decay_lengths) {
  require(lambda > 0.0, ErrorKind::invalid_parameter, "eigenvalue must be positive");
  require(domain.dim() == 3, ErrorKind::invalid_parameter, "box grids are three-dimensional");
  VectorXd lo, hi;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          lo = s.center.array() - s.radius;
          hi = s.center.array() + s.radius;
        } else if constexpr (std::is_same_v<S, Annulus>) {
          lo = s.center.array() - s.r_out;
          hi = s.center.array() + s.r_out;
        } else if constexpr (std::is_same_v<S, UnionOfBalls>) {
          lo = VectorXd::Constant(3, std::numeric_limits<double>::infinity());
          hi = -lo;
          for (const auto& b : s.balls) {
            lo = lo.cwiseMin((b.center.array() - b.radius).matrix());
            hi = hi.cwiseMax((b.center.array() + b.radius).matrix());
          }
        } else {
          lo = s.center - s.half_widths;
          hi = s.center + s.half_widths;
        }
      },
      domain.shape());
  const double margin = decay_lengths / std::sqrt(lambda);
  const Vector3d center = 0.5 * (lo + hi).head<3>();
  const Vector3d half = 0.5 * (hi - lo).head<3>() + Vector3d::Constant(margin);
  return build_box_grid(half, h, center, align);
}

ComparisonReport faber_krahn(const Domain& domain, const FaberKrahnOptions& options) {
  ComparisonReport rep;
  rep.kind = ComparisonKind::faber_krahn;
  const Domain star = schwarz_ball(domain);
  rep.rhs = radial_shoot(star).lambda;
  double err = 0.0;
  if (domain.is_centered_radial() && options.prefer_radial) {
    rep.lhs = radial_shoot(domain).lambda;
    err = options.tol * rep.lhs;
    rep.note = "radial shooting on both sides";
  } else {
    auto solve_at = [&](double h) {
      const BoxGrid g = truncation_grid(domain, rep.rhs, h);
      return solve_pencil(Discretization::box(g, domain), 1, options.tol)[0].lambda;
    };
    rep.lhs = solve_at(options.h);
    const double coarse = solve_at(2.0 * options.h);
    err = std::abs(rep.lhs - coarse);
    rep.note = "3D grid at h and 2h against radial shooting";
  }
  rep.tolerance = 3.0 * err;
  rep.margin = rep.lhs - rep.rhs;
  rep.verdict = rep.lhs >= rep.rhs - rep.tolerance;
  rep.equality = domain.is<Ball>() && std::abs(rep.margin) <= rep.tolerance;
  return rep;
}

ComparisonReport second_eig_bound(const Discretization& disc, const EigenBasis& basis,
                                  double tol) {
  require(basis.size() >= 2, ErrorKind::invalid_parameter, "need phi_2");
  ComparisonReport rep;
  rep.kind = ComparisonKind::second_bound;
  rep.lhs = basis[1].lambda;
  const VectorXd& phi2 = basis[1].phi.values;
  double best = 0.0;
  for (int sign : {1, -1}) {
    const VectorXd w = masked_weight(disc, [&](Index i) { return sign * phi2[i] > 0.0; });
    if (!(w.array() > 0.0).any()) {
      rep.note = sign > 0 ? "finding: empty Omega_+" : "finding: empty Omega_-";
      rep.verdict = false;
      return rep;
    }
    best = std::max(best, solve_pencil(disc.with_weight(w), 1, tol)[0].lambda);
  }
  rep.rhs = best;
  rep.margin = rep.lhs - rep.rhs;
  rep.tolerance = 10.0 * tol * rep.lhs;
  rep.verdict = rep.margin > rep.tolerance;
  return rep;
}

std::vector<HksRow> hks_sequence(double c, const std::vector<double>& separations,
                                 const HksOptions& options) {
  require(c > 0.0, ErrorKind::invalid_parameter, "volume must be positive");
  require(!separations.empty() && std::is_sorted(separations.begin(), separations.end()),
          ErrorKind::invalid_parameter, "separations must be ascending");
  const double r = ball_radius_for_volume(3, 0.5 * c);
  for (double d : separations)
    require(d > 2.0 * r, ErrorKind::invalid_parameter, "balls must be disjoint (d > 2r)");
  const double exact = radial_shoot(Domain::ball(3, r)).lambda;
  const double dmax = separations.back();
  const Domain hull = Domain::union_of_balls(
      {Ball{Vector3d(-0.5 * dmax, 0, 0), r}, Ball{Vector3d(0.5 * dmax, 0, 0), r}});
  const BoxGrid g = truncation_grid(hull, exact, options.h);

  std::vector<HksRow> rows;
  for (double d : separations) {
    const Vector3d c1(-0.5 * d, 0, 0), c2(0.5 * d, 0, 0);
    const Domain two = Domain::union_of_balls({Ball{c1, r}, Ball{c2, r}});
    const Discretization disc = Discretization::box(g, two);
    const EigenBasis basis = solve_pencil(disc, 2, options.tol);
    const Discretization one = Discretization::box(g, Domain::ball(c2, r));
    HksRow row;
    row.separation = d;
    row.lambda2 = basis[1].lambda;
    row.reference = solve_pencil(one, 1, options.tol)[0].lambda;
    row.exact_reference = exact;
    row.gap = row.lambda2 - row.reference;
    row.hks.kind = ComparisonKind::hks;
    row.hks.lhs = row.lambda2;
    row.hks.rhs = row.reference;
    row.hks.margin = row.gap;
    row.hks.tolerance = 10.0 * options.tol * row.lambda2;
    row.hks.verdict = row.gap > row.hks.tolerance;
    row.second_bound = second_eig_bound(disc, basis, options.tol);
    rows.push_back(row);
  }
  return rows;
}

// ---- Pohozaev ---------------------------------------------------------------------------------

double Nonlinearity::primitive(double s) const {
  if (kind == Kind::eigen) return 0.5 * value * s * s;
  return std::pow(std::abs(s), value) / value;
}

PohozaevReport pohozaev_residual(const Discretization& disc, const ScalarField& field,
                                 const Nonlinearity& f) {
  require(field.size() == disc.size(), ErrorKind::invalid_parameter, "field does not match grid");
  const int n = disc.dim();
  const VectorXd& u = field.values;
  PohozaevReport rep;
  rep.energy_term = (n - 2.0) / (2.0 * n) * u.dot(disc.apply_stiffness(u));
  double pot = 0.0;
  for (Index i = 0; i < u.size(); ++i) pot += disc.weight()[i] * f.primitive(u[i]);
  rep.potential_term = pot;
  rep.boundary_term =
      2.0 / n *
      surface_quadrature(disc.domain(), field, [&f](double s) { return f.primitive(s); });
  rep.residual = rep.energy_term - rep.potential_term + rep.boundary_term;
  rep.relative = rep.energy_term != 0.0 ? rep.residual / rep.energy_term : 0.0;
  return rep;
}

PohozaevReport pohozaev_residual(const Discretization& disc, const GroundState& state) {
  const auto u = materialize(state);
  require(u.has_value(), ErrorKind::invalid_parameter,
          "solution amplitude is outside the representable range");
  return pohozaev_residual(disc, ScalarField(disc.grid(), *u), Nonlinearity::power(state.p));
}

// ---- sweep ------------------------------------------------------------------------------------

double asymptotic_constant(const Discretization& disc, const VectorXd& phi1) {
  double s = 0.0;
  for (Index i = 0; i < phi1.size(); ++i) {
    const double q = phi1[i] * phi1[i];
    if (q > 0.0) s += disc.weight()[i] * q * std::log(q);
  }
  return std::exp(-0.5 * s);
}

GroundState least_energy_descent(const Discretization& disc, double p, const VectorXd& phi1,
                                 std::uint64_t seed) {
  MinimizeOptions mo;
  mo.init = phi1;
  mo.seed = seed;
  GroundState best = minimize_alpha(disc, p, mo);
  if (disc.is_radial()) return best;
  CounterRng rng(seed, 53);
  const VectorXd xi = rng.normal_vector(3).normalized();
  const BoxGrid& g = disc.box_grid();
  VectorXd tilted = phi1;
  for (Index i = 0; i < tilted.size(); ++i) tilted[i] *= std::exp(0.5 * g.node(i).dot(xi.head<3>()));
  mo.init = tilted;
  const GroundState other = minimize_alpha(disc, p, mo);
  if (other.alpha < best.alpha) best = other;
  return best;
}

SweepResult p_sweep(const Discretization& disc, const std::vector<double>& p_list,
                    const SweepOptions& options) {
  require(!p_list.empty(), ErrorKind::invalid_parameter, "empty exponent list");
  const double crit = critical_exponent(disc.dim());
  for (double p : p_list)
    require(p > 1.0 && p < crit && p != 2.0, ErrorKind::invalid_parameter,
            "sweep exponents must lie in (1, 2*) minus {2}");
  const EigenBasis eig = solve_pencil(disc, 1, options.eig_tol);
  SweepResult out;
  out.lambda1 = eig[0].lambda;
  out.target_constant = asymptotic_constant(disc, eig[0].phi.values);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double p : p_list) {
    SweepRow row;
    row.p = p;
    row.min_abs_lin_eig = nan;
    row.morse_eig = nan;
    row.min_abs_transverse = nan;
    row.approx_kernel_dim = -1;
    row.negative_count = -1;
    try {
      GroundState g = least_energy_descent(disc, p, eig[0].phi.values, options.seed);
      if (p > 2.0 && options.refine) g = newton_refine(disc, g);
      row.alpha_p = g.alpha;
      row.gap_to_lambda1 = g.alpha - out.lambda1;
      row.const_estimate = std::exp(std::log(out.lambda1 / g.alpha) / (2.0 - p));
      const SupNorm s = sup_norm_scaling(g);
      row.sup_pow = s.m_pow;
      row.ln_sup = s.log_m;
      row.residual = g.residual;
      if (p > 2.0 && options.linearized) {
        const SpectralWindow w = spectrum_near_zero(assemble_linearized(disc, g),
                                                    options.window_count, options.kernel_tol);
        row.min_abs_lin_eig = w.min_abs;
        row.approx_kernel_dim = w.approx_kernel_dim;
        row.negative_count = w.negative_count;
        Index morse = 0;
        for (Index i = 1; i < w.eigenvalues.size(); ++i)
          if (std::abs(w.eigenvalues[i] + (p - 2.0)) < std::abs(w.eigenvalues[morse] + (p - 2.0)))
            morse = i;
        row.morse_eig = w.eigenvalues[morse];
        row.min_abs_transverse = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < w.eigenvalues.size(); ++i)
          if (i != morse)
            row.min_abs_transverse = std::min(row.min_abs_transverse, std::abs(w.eigenvalues[i]));
      }
    } catch (const Error& e) {
      row.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    out.rows.push_back(row);
  }
  return out;
}

// ---- uniqueness -------------------------------------------------------------------------------

namespace {

bool same_point(const VectorXd& a, const VectorXd& b) { return (a - b).norm() <= 1e-12 * (1.0 + a.norm()); }

bool domain_invariant(const Domain& domain, const Vector3d& c, const Eigen::Matrix3d& s) {
  auto map = [&](const VectorXd& x) -> VectorXd {
    return c + s * (x.head<3>() - c);
  };
  return std::visit(
      [&](const auto& sh) -> bool {
        using S = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<S, Ball> || std::is_same_v<S, Annulus>) {
          return same_point(map(sh.center), sh.center);
        } else if constexpr (std::is_same_v<S, UnionOfBalls>) {
          for (const auto& b : sh.balls) {
            const VectorXd m = map(b.center);
            bool hit = false;
            for (const auto& o : sh.balls) hit = hit || (same_point(m, o.center) && o.radius == b.radius);
            if (!hit) return false;
          }
          return true;
        } else {
          if (!same_point(map(sh.center), sh.center)) return false;
          const Vector3d hw = sh.half_widths.template head<3>();
          return ((s.cwiseAbs() * hw) - hw).norm() <= 1e-12 * hw.norm();
        }
      },
      domain.shape());
}

}  // namespace

std::vector<std::vector<Index>> symmetry_group(const Discretization& disc) {
  std::vector<std::vector<Index>> group;
  std::vector<Index> id(static_cast<std::size_t>(disc.size()));
  std::iota(id.begin(), id.end(), 0);
  group.push_back(id);
  if (disc.is_radial()) return group;
  const BoxGrid& g = disc.box_grid();
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (int signs = 0; signs < 8; ++signs) {
      if (perm == std::array<int, 3>{0, 1, 2} && signs == 0) continue;
      Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
      bool ok = true;
      for (int a = 0; a < 3; ++a) {
        s(a, perm[a]) = (signs >> a) & 1 ? -1.0 : 1.0;
        ok = ok && g.n[a] == g.n[perm[a]];
      }
      if (!ok || !domain_invariant(disc.domain(), g.center, s)) continue;
      std::vector<Index> map(static_cast<std::size_t>(g.size()));
      for (Index idx = 0; idx < g.size(); ++idx) {
        const auto c = g.coords(idx);
        Eigen::Array3i t;
        for (int a = 0; a < 3; ++a) {
          const int src = c[perm[a]];
          t[a] = (signs >> a) & 1 ? g.n[a] - 1 - src : src;
        }
        map[idx] = g.index(t[0], t[1], t[2]);
      }
      group.push_back(std::move(map));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return group;
}

UniquenessReport multistart_uniqueness(const Discretization& disc, double p, int n_starts,
                                       const UniquenessOptions& options) {
  require(p > 2.0, ErrorKind::invalid_parameter, "uniqueness runs need p > 2");
  require(n_starts >= 1, ErrorKind::invalid_parameter, "need at least one start");
  const Domain& domain = disc.domain();
  const EigenBasis eig = solve_pencil(disc, 1, 1e-10);
  CounterRng rng(options.seed, 41);
  const double h = disc.is_radial() ? disc.radial_grid().delta() : disc.box_grid().h;
  const double reach = domain.circumscribing_radius();
  const VectorXd centroid = domain.centroid();

  std::vector<VectorXd> states;
  UniquenessReport rep;
  for (int s = 0; s < n_starts; ++s) {
    VectorXd init;
    if (s == 0) {
      init = eig[0].phi.values;
    } else {
      for (int tries = 0;; ++tries) {
        require(tries < 10000, ErrorKind::convergence, "could not place a start bump");
        VectorXd x(domain.dim());
        for (Index a = 0; a < x.size(); ++a) x[a] = rng.uniform(-reach, reach);
        if (disc.is_radial()) x.tail(x.size() - 1).setZero();
        const double sd = signed_distance(domain, x);
        if (sd >= -1.5 * h) continue;
        init = bump(disc, x, std::min(-sd, 1.0) * rng.uniform(0.6, 1.0));
        if (init.maxCoeff() > 0.0) break;
      }
    }
    try {
      MinimizeOptions mo;
      mo.init = init;
      mo.seed = options.seed + static_cast<std::uint64_t>(s);
      const GroundState g = newton_refine(disc, minimize_alpha(disc, p, mo));
      rep.alphas.push_back(g.alpha);
      states.push_back(g.v.values);
    } catch (const Error&) {
      ++rep.n_failed;
    }
  }
  require(!states.empty(), ErrorKind::convergence, "no start converged");
  rep.best_alpha = *std::min_element(rep.alphas.begin(), rep.alphas.end());
  const auto group = symmetry_group(disc);
  rep.group_order = static_cast<int>(group.size());
  const VectorXd& w = disc.mass();
  auto distance = [&](const VectorXd& a, const VectorXd& b) {
    const double nb = std::sqrt(b.cwiseProduct(b).dot(w));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& map : group) {
      double acc = 0.0;
      for (Index i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[map[i]];
        acc += w[i] * d * d;
      }
      best = std::min(best, std::sqrt(acc) / nb);
    }
    return best;
  };
  std::vector<std::size_t> least;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (rep.alphas[i] - rep.best_alpha <= options.alpha_tol * rep.best_alpha) least.push_back(i);
  rep.n_least = static_cast<int>(least.size());
  std::vector<std::size_t> reps;
  for (std::size_t i : least) {
    bool matched = false;
    for (std::size_t r : reps) {
      if (distance(states[i], states[r]) <= options.cluster_tol) {
        matched = true;
        break;
      }
    }
    if (!matched) reps.push_back(i);
    for (std::size_t j : least) {
      if (j >= i) break;
      rep.max_pairwise_dist = std::max(rep.max_pairwise_dist, distance(states[i], states[j]));
    }
  }
  rep.n_distinct = static_cast<int>(reps.size());
  return rep;
}

}  // namespace qomega
