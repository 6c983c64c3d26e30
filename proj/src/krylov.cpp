// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/krylov.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <vector>

namespace qomega {

namespace {

MatrixXd apply_columns(const ApplyFn& op, const MatrixXd& x) {
  MatrixXd y(x.rows(), x.cols());
  VectorXd in, out;
  for (Index j = 0; j < x.cols(); ++j) {
    in = x.col(j);
    op(in, out);
    y.col(j) = out;
  }
  return y;
}

MatrixXd random_block(Index n, int k, std::uint64_t seed) {
  CounterRng rng(seed, 17);
  MatrixXd x(n, k);
  for (int j = 0; j < k; ++j) x.col(j) = rng.normal_vector(n);
  return x;
}

// Keeps columns whose M-norm did not collapse, then SVQB.
MatrixXd svqb(MatrixXd x, MatrixXd& mx, const VectorXd& reference_norms) {
  MatrixXd g = x.transpose() * mx;
  g = 0.5 * (g + g.transpose()).eval();
  std::vector<Index> keep;
  for (Index j = 0; j < g.cols(); ++j) {
    const double nrm = std::sqrt(std::max(g(j, j), 0.0));
    if (nrm > 1e-10 * reference_norms[j] && nrm > 0.0) keep.push_back(j);
  }
  if (static_cast<Index>(keep.size()) < g.cols()) {
    MatrixXd xs(x.rows(), keep.size()), mxs(x.rows(), keep.size()), gs(keep.size(), keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a) {
      xs.col(a) = x.col(keep[a]);
      mxs.col(a) = mx.col(keep[a]);
      for (std::size_t b = 0; b < keep.size(); ++b) gs(a, b) = g(keep[a], keep[b]);
    }
    x = std::move(xs);
    mx = std::move(mxs);
    g = std::move(gs);
  }
  if (g.cols() == 0) return x;
  const VectorXd dinv = g.diagonal().cwiseSqrt().cwiseInverse();
  const MatrixXd gs = dinv.asDiagonal() * g * dinv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gs);
  const VectorXd& e = es.eigenvalues();
  const double emax = e.maxCoeff();
  std::vector<Index> good;
  for (Index j = 0; j < e.size(); ++j)
    if (e[j] > 1e-12 * emax) good.push_back(j);
  MatrixXd c(g.cols(), good.size());
  for (std::size_t a = 0; a < good.size(); ++a)
    c.col(a) = dinv.asDiagonal() * es.eigenvectors().col(good[a]) / std::sqrt(e[good[a]]);
  mx = mx * c;
  return x * c;
}

}  // namespace

MatrixXd orthonormalize(const ApplyFn& apply_m, const MatrixXd& basis, const MatrixXd& m_basis,
                        MatrixXd x, MatrixXd* m_x) {
  if (x.cols() == 0) {
    if (m_x) *m_x = MatrixXd(x.rows(), 0);
    return x;
  }
  MatrixXd mx = apply_columns(apply_m, x);
  VectorXd reference = (x.transpose() * mx).diagonal().cwiseMax(0.0).cwiseSqrt();
  for (int pass = 0; pass < 2; ++pass) {
    if (basis.cols() > 0) {
      const MatrixXd c = m_basis.transpose() * x;
      x.noalias() -= basis * c;
      mx = apply_columns(apply_m, x);
    }
    x = svqb(std::move(x), mx, reference);
    reference = VectorXd::Ones(x.cols());
    if (x.cols() == 0) break;
  }
  if (m_x) *m_x = std::move(mx);
  return x;
}

PencilEigs lanczos_largest(Index n, const ApplyFn& apply_b, const ApplyFn& apply_a,
                           const ApplyFn& solve_a, int k, double tol,
                           const LanczosOptions& options, const MatrixXd* start) {
  require(k >= 1 && k <= n, ErrorKind::invalid_parameter, "need 1 <= k <= n");
  int basis = options.basis_size > 0 ? options.basis_size : std::max(2 * k + 24, 48);
  basis = static_cast<int>(std::min<Index>(basis, n));
  const int keep_max = std::min(basis - 1, k + std::max(4, k / 2));

  MatrixXd v(n, basis + 1), av(n, basis + 1);
  {
    VectorXd x0 = (start && start->cols() > 0) ? VectorXd(start->rowwise().sum())
                                               : VectorXd(random_block(n, 1, options.seed).col(0));
    VectorXd ax;
    apply_a(x0, ax);
    const double nrm = std::sqrt(x0.dot(ax));
    require(nrm > 0.0, ErrorKind::invalid_parameter, "zero start vector");
    v.col(0) = x0 / nrm;
    av.col(0) = ax / nrm;
  }

  PencilEigs out;
  int j0 = 0;  // columns [0, j0] are filled on entry to a cycle
  VectorXd w, aw, bw;
  std::uint64_t refill = options.seed;
  for (int cycle = 0; cycle <= options.max_restarts; ++cycle) {
    int filled = j0 + 1;
    double beta = 0.0;
    for (int j = j0; j < basis; ++j) {
      apply_b(v.col(j), bw);
      solve_a(bw, w);
      for (int pass = 0; pass < 2; ++pass) {
        const VectorXd c = av.leftCols(j + 1).transpose() * w;
        w.noalias() -= v.leftCols(j + 1) * c;
      }
      apply_a(w, aw);
      beta = std::sqrt(std::max(w.dot(aw), 0.0));
      const double scale = std::sqrt(std::abs(v.col(j).dot(bw))) + 1e-300;
      if (beta <= 1e-13 * scale || j + 1 == n) {
        beta = 0.0;
        break;
      }
      if (j + 1 <= basis) {
        v.col(j + 1) = w / beta;
        av.col(j + 1) = aw / beta;
        filled = j + 2;
      }
    }
    const int m = std::min(filled, basis);
    MatrixXd bv(n, m);
    VectorXd tmp;
    for (int j = 0; j < m; ++j) {
      apply_b(v.col(j), tmp);
      bv.col(j) = tmp;
    }
    MatrixXd h = v.leftCols(m).transpose() * bv;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    // descending
    const VectorXd theta = es.eigenvalues().reverse();
    const MatrixXd s = es.eigenvectors().rowwise().reverse();
    const int want = std::min(k, m);
    VectorXd est(want);
    bool all = want == k;
    for (int i = 0; i < want; ++i) {
      est[i] = std::abs(beta * s(m - 1, i));
      if (est[i] > tol * std::abs(theta[i])) all = false;
    }
    out.iterations += m - j0;
    if (all || cycle == options.max_restarts) {
      out.values = theta.head(want);
      out.vectors = v.leftCols(m) * s.leftCols(want);
      out.residuals = est.cwiseQuotient(theta.head(want).cwiseAbs());
      out.converged = all;
      return out;
    }
    const int keep = std::min(keep_max, m - 1);
    const MatrixXd y = v.leftCols(m) * s.leftCols(keep);
    const MatrixXd ay = av.leftCols(m) * s.leftCols(keep);
    VectorXd next, anext;
    if (beta > 0.0 && filled > m) {
      next = v.col(m);
      anext = av.col(m);
    } else {
      // invariant subspace: continue from a fresh direction
      MatrixXd r = random_block(n, 1, ++refill);
      MatrixXd ar;
      r = orthonormalize(apply_a, y, ay, r, &ar);
      require(r.cols() == 1, ErrorKind::convergence, "Lanczos could not extend the basis");
      next = r.col(0);
      anext = ar.col(0);
    }
    v.leftCols(keep) = y;
    av.leftCols(keep) = ay;
    v.col(keep) = next;
    av.col(keep) = anext;
    j0 = keep;
  }
  return out;
}

PencilEigs lobpcg_smallest(Index n, const ApplyFn& apply_k, const ApplyFn& apply_m,
                           const ApplyFn& precond, int k, double tol,
                           const LobpcgOptions& options, const MatrixXd* start) {
  require(k >= 1 && 3 * k <= n, ErrorKind::invalid_parameter, "need 1 <= 3k <= n");
  MatrixXd x0 = random_block(n, k, options.seed);
  if (start) {
    for (Index j = 0; j < std::min<Index>(k, start->cols()); ++j) x0.col(j) = start->col(j);
  }
  MatrixXd mx;
  MatrixXd x = orthonormalize(apply_m, MatrixXd(n, 0), MatrixXd(n, 0), x0, &mx);
  require(x.cols() == k, ErrorKind::invalid_parameter, "start block is rank deficient");
  {
    const MatrixXd kx = apply_columns(apply_k, x);
    MatrixXd h = x.transpose() * kx;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    x = x * es.eigenvectors();
    mx = mx * es.eigenvectors();
  }
  MatrixXd p(n, 0), mp(n, 0);
  PencilEigs out;
  VectorXd lambda(k), res(k);
  for (int it = 0; it <= options.max_iter; ++it) {
    const MatrixXd kx = apply_columns(apply_k, x);
    for (int i = 0; i < k; ++i) lambda[i] = x.col(i).dot(kx.col(i));
    MatrixXd r = kx - mx * lambda.asDiagonal();
    std::vector<Index> active;
    for (int i = 0; i < k; ++i) {
      const double denom = kx.col(i).norm() + std::abs(lambda[i]) * mx.col(i).norm();
      res[i] = r.col(i).norm() / (denom > 0.0 ? denom : 1.0);
      if (res[i] > tol) active.push_back(i);
    }
    out.iterations = it;
    if (active.empty() || it == options.max_iter) {
      out.values = lambda;
      out.vectors = x;
      out.residuals = res;
      out.converged = active.empty();
      return out;
    }
    MatrixXd wr(n, active.size());
    for (std::size_t a = 0; a < active.size(); ++a) wr.col(a) = r.col(active[a]);
    r.resize(0, 0);
    MatrixXd w = apply_columns(precond, wr);
    wr.resize(0, 0);
    MatrixXd mw;
    w = orthonormalize(apply_m, x, mx, std::move(w), &mw);
    MatrixXd xw(n, k + w.cols()), mxw(n, k + w.cols());
    xw << x, w;
    mxw << mx, mw;
    if (p.cols() > 0) p = orthonormalize(apply_m, xw, mxw, std::move(p), &mp);
    const Index cols = k + w.cols() + p.cols();
    MatrixXd s(n, cols);
    s << x, w, p;
    xw.resize(0, 0);
    MatrixXd ks(n, cols);
    ks << kx, apply_columns(apply_k, w), apply_columns(apply_k, p);
    MatrixXd h = s.transpose() * ks;
    ks.resize(0, 0);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    const MatrixXd c = es.eigenvectors().leftCols(k);
    MatrixXd ms(n, cols);
    ms << mx, mw, mp;
    x = s * c;
    mx = ms * c;
    const Index rest = cols - k;
    p = s.rightCols(rest) * c.bottomRows(rest);
    mp = ms.rightCols(rest) * c.bottomRows(rest);
  }
  return out;
}

}  // namespace qomega
