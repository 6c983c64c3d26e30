// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef QOMEGA_EIGENSOLVE_HPP
#define QOMEGA_EIGENSOLVE_HPP

#include "qomega/discretize.hpp"
#include "qomega/krylov.hpp"

#include <optional>
#include <vector>

namespace qomega {

/// (Lambda_k, phi_k) with phi^T D phi = 1.
struct EigenPair {
  int k = 1;
  double lambda = 0.0;
  ScalarField phi;
  /// |phi^T A phi - Lambda phi^T D phi| / |phi^T A phi|
  double rayleigh_residual = 0.0;
  /// |A phi - Lambda D phi| / |A phi|
  double residual = 0.0;
};

struct EigenBasis {
  std::vector<EigenPair> pairs;
  MatrixXd gram_a;
  MatrixXd gram_d;
  /// Size of the cluster (relative spread 1e-6) each pair belongs to.
  std::vector<int> multiplicity;
  int iterations = 0;

  const EigenPair& operator[](std::size_t i) const { return pairs[i]; }
  std::size_t size() const { return pairs.size(); }
  /// max_{i != j} |gram_a(i,j)| / sqrt(Lambda_i Lambda_j)
  double gram_a_offdiag() const;
  double gram_d_offdiag() const;
};

enum class PencilMethod { automatic, lanczos, lobpcg };

struct PencilOptions {
  int k_max = 1;
  double tol = 1e-10;
  PencilMethod method = PencilMethod::automatic;
  int max_iter = 3000;
  std::uint64_t seed = 1;
  /// Initial block (columns), e.g. an interpolated coarse solution.
  const MatrixXd* start = nullptr;
};

/// Largest positive mu of D x = mu A x mapped to Lambda = 1/mu ascending;
/// phi D-normalized and sign-fixed (phi_1 positive at the node nearest the
/// centroid, others positive at their first non-negligible entry).
EigenBasis solve_pencil(const Discretization& disc, const PencilOptions& options);
EigenBasis solve_pencil(const Discretization& disc, int k_max, double tol = 1e-10);

/// Matrix form: A SPD (sparse Cholesky), D diagonal. Returns Lambda ascending
/// and D-normalized columns.
std::pair<VectorXd, MatrixXd> solve_pencil(const SparseMatrix& a, const VectorXd& d, int k_max,
                                           double tol = 1e-10);

/// Gram matrices and eigenvalue clusters of a set of pairs.
void finalize_basis(const Discretization& disc, EigenBasis& basis);

/// u(r) for a radial domain, piecewise Bessel: r^{1-N/2} Z_nu(k r) with
/// nu = l + N/2 - 1 and Z in {J, Y} where Q = +1, {I, K} where Q = -1. The
/// full eigenfunction is u(|x|) Y_l(x/|x|) with a unit-normalized spherical
/// harmonic; for l = 0 the constant harmonic is folded into u.
class BesselProfile {
 public:
  BesselProfile() = default;
  BesselProfile(const Domain& domain, int ell, double lambda);

  double operator()(double r) const;
  double derivative(double r) const;
  /// Scales so that \int Q u^2 r^{N-1} dr (times |S^{N-1}| for l = 0) is 1.
  void normalize();

  double lambda() const { return lambda_; }
  int ell() const { return ell_; }
  int dim() const { return dim_; }

  /// Normalized Wronskian of the regular interior solution against the
  /// decaying exterior one at the outer radius.
  double mismatch() const { return mismatch_; }

 private:
  struct Layer {
    double lo, hi;
    bool inside;
    double a, b;  // coefficients of (J, Y) or (I, K)
  };
  double eval(const Layer& layer, double r, bool deriv) const;
  const Layer& layer_at(double r) const;

  int dim_ = 3;
  int ell_ = 0;
  double lambda_ = 0.0;
  double nu_ = 0.5;
  double k_ = 1.0;
  double scale_ = 1.0;
  double mismatch_ = 0.0;
  std::vector<Layer> layers_;
};

struct RadialMode {
  double lambda = 0.0;
  int ell = 0;
  int index = 1;
  BesselProfile profile;
  double mismatch = 0.0;

  /// The profile on the nodes of a radial grid, as an l = 0 field.
  ScalarField sample(const RadialGrid& grid) const;
  /// The l = 0 profile (or the l = 1 mode along `axis`) on a box grid.
  ScalarField sample(const BoxGrid& grid, const Vector3d& axis = Vector3d::UnitZ()) const;
};

/// Bessel matching function: normalized Wronskian at the outer interface.
double radial_mismatch(const Domain& domain, int ell, double lambda);

/// k-th eigenvalue (k = 1, 2, ...) of the l-th angular branch on a centered
/// ball or annulus: sign changes of the matching function are located on
/// 200 uniform steps of `bracket` (default (0, 50 / R^2]) and refined by
/// bisection.
RadialMode radial_shoot(const Domain& domain, int k = 1, int ell = 0,
                        std::optional<std::pair<double, double>> bracket = std::nullopt);

struct NegativeScanRow {
  double L = 0.0;
  double lambda_neg = 0.0;
  Index nodes_per_axis = 0;
};

/// Negative eigenvalue of smallest magnitude on cubes [-L, L]^3 with n nodes
/// per axis.
std::vector<NegativeScanRow> negative_spectrum_scan(const Domain& domain,
                                                    const std::vector<double>& l_list, int n,
                                                    double tol = 1e-9);

/// Sign convention shared by all eigenvectors.
void fix_sign(const Discretization& disc, int k, VectorXd& phi);

}  // namespace qomega

#endif  // QOMEGA_EIGENSOLVE_HPP
