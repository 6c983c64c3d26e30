// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/grid.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace qomega {

BoxGrid build_box_grid(double half_width, int n) {
  require(half_width > 0.0 && std::isfinite(half_width), ErrorKind::invalid_parameter,
          "box half-width must be positive");
  require(n >= 8, ErrorKind::invalid_parameter, "need at least 8 nodes per axis");
  BoxGrid g;
  g.n = Eigen::Array3i::Constant(n);
  g.h = 2.0 * half_width / (n + 1);
  return g;
}

BoxGrid build_box_grid(const Vector3d& half_widths, double h, const Vector3d& center, int align) {
  require(h > 0.0 && (half_widths.array() > 0.0).all(), ErrorKind::invalid_parameter,
          "box half-widths and spacing must be positive");
  require(align >= 1, ErrorKind::invalid_parameter, "alignment must be positive");
  BoxGrid g;
  g.center = center;
  g.h = h;
  for (int a = 0; a < 3; ++a) {
    const long cells = std::lround(std::ceil(2.0 * half_widths[a] / h - 1e-9));
    const long aligned = ((cells + align - 1) / align) * align;
    g.n[a] = static_cast<int>(aligned - 1);
    require(g.n[a] >= 8, ErrorKind::invalid_parameter, "need at least 8 nodes per axis");
  }
  return g;
}

RadialGrid build_radial_grid(int dim, double r_max, int m) {
  require(dim >= 3, ErrorKind::invalid_parameter, "radial grid needs N >= 3");
  require(r_max > 0.0 && std::isfinite(r_max), ErrorKind::invalid_parameter, "r_max must be positive");
  require(m >= 8, ErrorKind::invalid_parameter, "need at least 8 radial nodes");
  return RadialGrid{dim, r_max, m};
}

Index grid_size(const Grid& grid) {
  return std::visit([](const auto& g) { return g.size(); }, grid);
}

int grid_dim(const Grid& grid) {
  if (const auto* r = std::get_if<RadialGrid>(&grid)) return r->dim;
  return 3;
}

VectorXd node_radii(const Grid& grid, const VectorXd& center) {
  if (const auto* r = std::get_if<RadialGrid>(&grid)) {
    VectorXd out(r->size());
    for (Index j = 0; j < r->size(); ++j) out[j] = r->radius(j);
    return out;
  }
  const auto& b = std::get<BoxGrid>(grid);
  const Vector3d c = center.size() == 3 ? Vector3d(center) : Vector3d::Zero();
  VectorXd out(b.size());
  for (Index idx = 0; idx < b.size(); ++idx) out[idx] = (b.node(idx) - c).norm();
  return out;
}

ScalarField::ScalarField(Grid g, VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  require(values.size() == grid_size(grid), ErrorKind::invalid_parameter,
          "field length does not match grid node count");
}

namespace {

// Value at integer node coordinates, zero on and beyond the Dirichlet faces.
double at(const BoxGrid& g, const VectorXd& v, int i, int j, int k) {
  if (i < 0 || j < 0 || k < 0 || i >= g.n[0] || j >= g.n[1] || k >= g.n[2]) return 0.0;
  return v[g.index(i, j, k)];
}

}  // namespace

double interpolate_linear(const BoxGrid& g, const VectorXd& v, const Vector3d& x) {
  // Node i sits at lo + (i + 1) h; shift so that the Dirichlet face is index -1.
  const Vector3d s = (x - (g.center - g.half_widths())) / g.h - Vector3d::Ones();
  std::array<int, 3> base{};
  std::array<double, 3> frac{};
  for (int a = 0; a < 3; ++a) {
    if (s[a] < -1.0 || s[a] > g.n[a]) return 0.0;
    base[a] = static_cast<int>(std::floor(s[a]));
    frac[a] = s[a] - base[a];
  }
  double out = 0.0;
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) {
        const double w = (di ? frac[0] : 1.0 - frac[0]) * (dj ? frac[1] : 1.0 - frac[1]) *
                         (dk ? frac[2] : 1.0 - frac[2]);
        if (w != 0.0) out += w * at(g, v, base[0] + di, base[1] + dj, base[2] + dk);
      }
  return out;
}

double interpolate_cubic(const BoxGrid& g, const VectorXd& v, const Vector3d& x) {
  const Vector3d s = (x - (g.center - g.half_widths())) / g.h - Vector3d::Ones();
  std::array<int, 3> base{};
  std::array<std::array<double, 4>, 3> w{};
  for (int a = 0; a < 3; ++a) {
    base[a] = static_cast<int>(std::floor(s[a]));
    if (base[a] < 1 || base[a] + 2 >= g.n[a]) return interpolate_linear(g, v, x);
    const double t = s[a] - base[a];
    // Lagrange weights on nodes base-1, base, base+1, base+2.
    w[a][0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    w[a][1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    w[a][2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    w[a][3] = (t + 1.0) * t * (t - 1.0) / 6.0;
  }
  double out = 0.0;
  for (int dk = 0; dk < 4; ++dk)
    for (int dj = 0; dj < 4; ++dj) {
      const double wjk = w[1][dj] * w[2][dk];
      for (int di = 0; di < 4; ++di)
        out += w[0][di] * wjk * v[g.index(base[0] - 1 + di, base[1] - 1 + dj, base[2] - 1 + dk)];
    }
  return out;
}

double interpolate_radial(const RadialGrid& g, const VectorXd& v, double r) {
  const double s = r / g.delta();
  if (s >= g.m) return 0.0;
  const int j = static_cast<int>(std::floor(s));
  const double t = s - j;
  const double right = j + 1 < g.m ? v[j + 1] : 0.0;
  return (1.0 - t) * v[j] + t * right;
}

void write_csv(std::ostream& os, const ScalarField& field) {
  char buf[128];
  if (const auto* r = std::get_if<RadialGrid>(&field.grid)) {
    os << "r,value\n";
    for (Index j = 0; j < r->size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r->radius(j), field.values[j]);
      os << buf;
    }
    return;
  }
  const auto& b = std::get<BoxGrid>(field.grid);
  os << "x,y,z,value\n";
  for (Index idx = 0; idx < b.size(); ++idx) {
    const Vector3d x = b.node(idx);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x[0], x[1], x[2], field.values[idx]);
    os << buf;
  }
}

void write_csv(const std::string& path, const ScalarField& field) {
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorKind::io, "cannot open " + path);
  write_csv(os, field);
}

}  // namespace qomega
