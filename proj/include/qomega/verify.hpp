// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef QOMEGA_VERIFY_HPP
#define QOMEGA_VERIFY_HPP

#include "qomega/eigensolve.hpp"
#include "qomega/linearized.hpp"
#include "qomega/semilinear.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qomega {

// ---- reference constants -------------------------------------------------

/// ((4p - 2N(p-2) - 4) / (p-2)^2)^{1/(p-2)}: amplitude of the explicit
/// power-law supersolution.
double decay_constant_cp(double p, int dim);

/// 2 (q - (q-2)(N-1)) / (q-2)^2
double decay_constant_cq(double q, int dim);

/// 2^{2-N} (3N^2 - 10N + 8)^{(N-2)/2}
double serrin_constant_small(int dim);

/// 2^{(2-N)/2} (N-2)^{N-2}
double serrin_constant_large(int dim);

// ---- decay fits ------------------------------------------------------------

enum class DecayModel { linear_exp, power, serrin_log };

const char* to_string(DecayModel model);

struct FitReport {
  DecayModel model = DecayModel::linear_exp;
  double fitted_rate = 0.0;
  double reference_rate = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double r_squared = 0.0;
  int n_samples = 0;
  /// exp(intercept) of the fitted model.
  double amplitude = 0.0;

  double relative_error() const {
    return std::abs(fitted_rate - reference_rate) / std::abs(reference_rate);
  }
};

/// Medians of r and of `transform(value, r)` over shells of width h (box)
/// or single nodes (radial), restricted to [r_lo, r_hi] and to |value|
/// above `floor_rel` times the sup.
struct ShellSamples {
  std::vector<double> r;
  std::vector<double> value;
};

ShellSamples shell_medians(const ScalarField& field, const VectorXd& center, double r_lo,
                           double r_hi, const std::function<double(double, double)>& transform,
                           double floor_rel = 1e-13);

/// Largest radius a decay window may reach: 5 spacings inside the
/// truncation boundary.
double contamination_radius(const Grid& grid, const VectorXd& center);

/// ln(|phi| r^{(N-1)/2}) = -rho r + c, rho >= 0, over shell medians.
FitReport fit_linear_decay(const ScalarField& phi, double lambda, double r_lo, double r_hi,
                           const VectorXd& center = VectorXd());

/// Power model ln v = -s ln r + c with reference 2/(p-2); for p equal to
/// the Serrin exponent, ln v against ln(r sqrt(ln r)) with reference N-2.
/// Rates are reported as positive decay exponents.
FitReport fit_semilinear_decay(const GroundState& state, double r_lo, double r_hi,
                               const VectorXd& center = VectorXd());

// ---- nodal structure and symmetry -----------------------------------------

/// 6-connected components of {phi > t} plus those of {phi < -t} with
/// t = threshold_rel * sup|phi|.
int count_nodal_domains(const ScalarField& phi, double threshold_rel = 1e-3);

/// Max over shells of width h of the residual of a quadratic-in-r fit,
/// relative to sup|phi|.
double check_radial(const ScalarField& phi, const Domain& domain, double r_max = -1.0);

struct FoliatedReport {
  Vector3d axis = Vector3d::UnitX();
  double axial_dev = 0.0;
  double monotonicity_violation = 0.0;
  /// Max over directions of the smaller one-sided reflection violation.
  double reflection_violation = 0.0;
  int directions = 0;
};

FoliatedReport check_foliated_schwarz(const ScalarField& phi, const Domain& domain,
                                      double r_max = -1.0, int directions = 20,
                                      std::uint64_t seed = 7);

// ---- comparisons -----------------------------------------------------------

enum class ComparisonKind { faber_krahn, hks, second_bound, scaling, monotonicity };

const char* to_string(ComparisonKind kind);

struct ComparisonReport {
  ComparisonKind kind = ComparisonKind::faber_krahn;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  bool verdict = false;
  bool equality = false;
  std::string note;
};

struct FaberKrahnOptions {
  double h = 0.1;
  /// Radial grids and shooting resolve centered radial domains exactly.
  bool prefer_radial = true;
  double tol = 1e-9;
};

/// Lambda_1(Omega) against Lambda_1(Omega^*). The discretization error of a
/// 3D value is estimated from the spacings h and 2h.
ComparisonReport faber_krahn(const Domain& domain, const FaberKrahnOptions& options = {});

/// Box around `domain` with the truncation margin for eigenvalue `lambda`.
BoxGrid truncation_grid(const Domain& domain, double lambda, double h, int align = 8,
                        double decay_lengths = 8.0);

/// Nodal bound Lambda_2 > max(Lambda_1(Omega_+), Lambda_1(Omega_-)) with
/// Omega_{+-} = Omega cut by the sign of phi_2.
ComparisonReport second_eig_bound(const Discretization& disc, const EigenBasis& basis,
                                  double tol = 1e-9);

struct HksRow {
  double separation = 0.0;
  double lambda2 = 0.0;
  double reference = 0.0;  ///< Lambda_1 of one ball, same grid
  double exact_reference = 0.0;
  double gap = 0.0;
  ComparisonReport hks;
  ComparisonReport second_bound;
};

struct HksOptions {
  double h = 0.2;
  double tol = 1e-9;
};

/// Two balls of volume c/2 each, centered at -d/2 e_1 and d/2 e_1.
std::vector<HksRow> hks_sequence(double c, const std::vector<double>& separations,
                                 const HksOptions& options = {});

// ---- Pohozaev ----------------------------------------------------------------

struct Nonlinearity {
  enum class Kind { power, eigen } kind = Kind::eigen;
  double value = 0.0;  ///< p or Lambda

  static Nonlinearity power(double p) { return {Kind::power, p}; }
  static Nonlinearity eigen(double lambda) { return {Kind::eigen, lambda}; }
  double primitive(double s) const;
};

struct PohozaevReport {
  double residual = 0.0;
  double boundary_term = 0.0;
  double energy_term = 0.0;
  double potential_term = 0.0;
  /// residual / energy_term
  double relative = 0.0;
};

/// (1/2^*) u^T A u - sum D F(u) + (2/N) \oint F(u) zeta.nu
PohozaevReport pohozaev_residual(const Discretization& disc, const ScalarField& field,
                                 const Nonlinearity& f);

PohozaevReport pohozaev_residual(const Discretization& disc, const GroundState& state);

// ---- p sweep and uniqueness --------------------------------------------------

struct SweepRow {
  double p = 0.0;
  double alpha_p = 0.0;
  double gap_to_lambda1 = 0.0;
  double const_estimate = 0.0;
  double sup_pow = 0.0;
  double ln_sup = 0.0;
  double min_abs_lin_eig = 0.0;
  int approx_kernel_dim = 0;
  int negative_count = 0;
  /// Window eigenvalue nearest -(p-2), the value taken along u_p itself.
  double morse_eig = 0.0;
  /// Smallest |lambda| over the rest of the window.
  double min_abs_transverse = 0.0;
  double residual = 0.0;
  std::string error;
};

struct SweepResult {
  double lambda1 = 0.0;
  double target_constant = 0.0;
  std::vector<SweepRow> rows;
};

struct SweepOptions {
  double eig_tol = 1e-11;
  /// Seeds the tilted start that breaks domain symmetries.
  std::uint64_t seed = 5;
  bool refine = true;
  bool linearized = true;
  int window_count = 4;
  double kernel_tol = kDefaultKernelTol;
};

/// exp(-1/2 sum D phi^2 ln phi^2) over nodes with phi != 0.
double asymptotic_constant(const Discretization& disc, const VectorXd& phi1);

/// Descends from phi_1 and from phi_1 tilted by exp(0.5 xi.x) for a seeded
/// random unit xi; returns the lower alpha. A symmetric start can stall on a
/// symmetric saddle when the domain has mirror symmetries.
GroundState least_energy_descent(const Discretization& disc, double p, const VectorXd& phi1,
                                 std::uint64_t seed);

SweepResult p_sweep(const Discretization& disc, const std::vector<double>& p_list,
                    const SweepOptions& options = {});

/// Grid symmetries of a domain: permutations of node indices that map the
/// grid and the domain to themselves (always includes the identity).
std::vector<std::vector<Index>> symmetry_group(const Discretization& disc);

struct UniquenessReport {
  int n_distinct = 0;
  double max_pairwise_dist = 0.0;
  int n_failed = 0;
  int n_least = 0;
  int group_order = 1;
  double best_alpha = 0.0;
  std::vector<double> alphas;
};

struct UniquenessOptions {
  std::uint64_t seed = 11;
  double alpha_tol = 1e-8;
  double cluster_tol = 1e-6;
};

UniquenessReport multistart_uniqueness(const Discretization& disc, double p, int n_starts,
                                       const UniquenessOptions& options = {});

}  // namespace qomega

#endif  // QOMEGA_VERIFY_HPP
