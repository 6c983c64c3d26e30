// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/multigrid.hpp"

#include <vector>

namespace qomega {

void apply_box_stiffness(const Eigen::Array3i& n, double h, const VectorXd& x, VectorXd& y) {
  const Index nx = n[0], ny = n[1], nz = n[2];
  const Index sy = nx, sz = nx * ny;
  y.resize(x.size());
  for (Index k = 0; k < nz; ++k)
    for (Index j = 0; j < ny; ++j) {
      const Index row = nx * (j + ny * k);
      for (Index i = 0; i < nx; ++i) {
        const Index idx = row + i;
        double s = 6.0 * x[idx];
        if (i > 0) s -= x[idx - 1];
        if (i + 1 < nx) s -= x[idx + 1];
        if (j > 0) s -= x[idx - sy];
        if (j + 1 < ny) s -= x[idx + sy];
        if (k > 0) s -= x[idx - sz];
        if (k + 1 < nz) s -= x[idx + sz];
        y[idx] = h * s;
      }
    }
}

SparseMatrix assemble_box_stiffness(const Eigen::Array3i& n, double h) {
  const Index nx = n[0], ny = n[1], nz = n[2];
  const Index size = nx * ny * nz;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(7 * size));
  for (Index k = 0; k < nz; ++k)
    for (Index j = 0; j < ny; ++j)
      for (Index i = 0; i < nx; ++i) {
        const Index idx = i + nx * (j + ny * k);
        t.emplace_back(idx, idx, 6.0 * h);
        if (i > 0) t.emplace_back(idx, idx - 1, -h);
        if (i + 1 < nx) t.emplace_back(idx, idx + 1, -h);
        if (j > 0) t.emplace_back(idx, idx - nx, -h);
        if (j + 1 < ny) t.emplace_back(idx, idx + nx, -h);
        if (k > 0) t.emplace_back(idx, idx - nx * ny, -h);
        if (k + 1 < nz) t.emplace_back(idx, idx + nx * ny, -h);
      }
  SparseMatrix a(size, size);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

namespace {

void smooth(const Eigen::Array3i& n, double h, const VectorXd& b, VectorXd& x, int color) {
  const Index nx = n[0], ny = n[1], nz = n[2];
  const Index sy = nx, sz = nx * ny;
  const double inv_h = 1.0 / h;
  for (Index k = 0; k < nz; ++k)
    for (Index j = 0; j < ny; ++j) {
      const Index row = nx * (j + ny * k);
      for (Index i = (j + k + color) & 1; i < nx; i += 2) {
        const Index idx = row + i;
        double s = b[idx] * inv_h;
        if (i > 0) s += x[idx - 1];
        if (i + 1 < nx) s += x[idx + 1];
        if (j > 0) s += x[idx - sy];
        if (j + 1 < ny) s += x[idx + sy];
        if (k > 0) s += x[idx - sz];
        if (k + 1 < nz) s += x[idx + sz];
        x[idx] = s / 6.0;
      }
    }
}

constexpr double kWeight[3] = {0.5, 1.0, 0.5};

// coarse = P^T fine
void restrict_to(const Eigen::Array3i& nf, const Eigen::Array3i& nc, const VectorXd& fine,
                 VectorXd& coarse) {
  coarse.resize(Index(nc[0]) * nc[1] * nc[2]);
  const Index fx = nf[0], fxy = Index(nf[0]) * nf[1];
  for (int K = 0; K < nc[2]; ++K)
    for (int J = 0; J < nc[1]; ++J)
      for (int I = 0; I < nc[0]; ++I) {
        const Index center = (2 * I + 1) + fx * (2 * J + 1) + fxy * (2 * K + 1);
        double s = 0.0;
        for (int c = -1; c <= 1; ++c)
          for (int b = -1; b <= 1; ++b) {
            const double wbc = kWeight[b + 1] * kWeight[c + 1];
            const Index base = center + fx * b + fxy * c;
            s += wbc * (0.5 * fine[base - 1] + fine[base] + 0.5 * fine[base + 1]);
          }
        coarse[I + Index(nc[0]) * (J + Index(nc[1]) * K)] = s;
      }
}

// fine += P coarse
void prolong_add(const Eigen::Array3i& nf, const Eigen::Array3i& nc, const VectorXd& coarse,
                 VectorXd& fine) {
  const Index fx = nf[0], fxy = Index(nf[0]) * nf[1];
  for (int K = 0; K < nc[2]; ++K)
    for (int J = 0; J < nc[1]; ++J)
      for (int I = 0; I < nc[0]; ++I) {
        const double v = coarse[I + Index(nc[0]) * (J + Index(nc[1]) * K)];
        if (v == 0.0) continue;
        const Index center = (2 * I + 1) + fx * (2 * J + 1) + fxy * (2 * K + 1);
        for (int c = -1; c <= 1; ++c)
          for (int b = -1; b <= 1; ++b) {
            const double wbc = kWeight[b + 1] * kWeight[c + 1] * v;
            const Index base = center + fx * b + fxy * c;
            fine[base - 1] += 0.5 * wbc;
            fine[base] += wbc;
            fine[base + 1] += 0.5 * wbc;
          }
      }
}

}  // namespace

BoxMultigrid::BoxMultigrid(const BoxGrid& grid, int smoothing_steps)
    : smoothing_steps_(smoothing_steps) {
  Level level{grid.n, grid.h};
  levels_.push_back(level);
  while (true) {
    const Eigen::Array3i& n = levels_.back().n;
    bool can = true;
    for (int a = 0; a < 3; ++a) can = can && ((n[a] + 1) % 2 == 0) && ((n[a] + 1) / 2 - 1 >= 3);
    if (!can) break;
    Level next{(n + 1) / 2 - 1, 2.0 * levels_.back().h};
    levels_.push_back(next);
  }
  coarse_ = std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>();
  coarse_->compute(assemble_box_stiffness(levels_.back().n, levels_.back().h));
  require(coarse_->info() == Eigen::Success, ErrorKind::assembly,
          "coarse-grid Cholesky factorization failed");
}

void BoxMultigrid::apply(const VectorXd& r, VectorXd& z) const {
  z.setZero(r.size());
  cycle(0, r, z);
}

void BoxMultigrid::vcycle(const VectorXd& b, VectorXd& x) const { cycle(0, b, x); }

void BoxMultigrid::cycle(std::size_t l, const VectorXd& b, VectorXd& x) const {
  const Level& lev = levels_[l];
  if (l + 1 == levels_.size()) {
    x = coarse_->solve(b);
    return;
  }
  for (int s = 0; s < smoothing_steps_; ++s) {
    smooth(lev.n, lev.h, b, x, 0);
    smooth(lev.n, lev.h, b, x, 1);
  }
  VectorXd r;
  apply_box_stiffness(lev.n, lev.h, x, r);
  r = b - r;
  const Level& coarse = levels_[l + 1];
  VectorXd rc;
  restrict_to(lev.n, coarse.n, r, rc);
  r.resize(0);
  VectorXd ec = VectorXd::Zero(coarse.size());
  cycle(l + 1, rc, ec);
  prolong_add(lev.n, coarse.n, ec, x);
  for (int s = 0; s < smoothing_steps_; ++s) {
    smooth(lev.n, lev.h, b, x, 1);
    smooth(lev.n, lev.h, b, x, 0);
  }
}

}  // namespace qomega
