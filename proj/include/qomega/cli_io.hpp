// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef QOMEGA_CLI_IO_HPP
#define QOMEGA_CLI_IO_HPP

#include "qomega/discretize.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qomega {

inline constexpr const char* kVersion = "qomega 0.1.0";

enum class GridKind { box, radial };

/// Everything a run needs, validated before any solve starts.
struct ExperimentConfig {
  /// Raw `domain.*` entries; `domain` is rebuilt from them by finalize_config.
  std::map<std::string, std::string> domain_params{{"kind", "ball"}, {"radius", "1"}};
  Domain domain = Domain::ball(3, 1.0);
  GridKind grid_kind = GridKind::box;
  /// Box half-width L and nodes per axis n; `grid_h`, when set, replaces n.
  double grid_L = 6.0;
  int grid_n = 64;
  std::optional<double> grid_h;
  int radial_m = 2000;
  double radial_r_max = 40.0;
  double solver_tol = 1e-10;
  int solver_max_iter = 3000;
  int eig_k = 4;
  double p = 2.5;
  std::vector<double> p_list;
  std::uint64_t seed = 0;
  int n_starts = 20;
  double fit_r_lo = 1.5;
  double fit_r_hi = 1e300;
  std::string fit_model = "linear";
  double hks_volume = 0.0;
  std::vector<double> hks_separations{3.0, 4.0, 6.0, 8.0};
  double hks_h = 0.2;
  std::vector<double> scan_L{4.0, 6.0, 8.0};
  std::string output_path;
  std::string field_prefix;
  bool timings = false;
};

/// Applies one `section.key = value` assignment. Unknown keys raise
/// unknown_key, malformed values raise config naming the key.
void set_config_key(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Applies line-oriented text. '#' starts a comment; blank lines are skipped.
void apply_config_text(ExperimentConfig& config, std::string_view text);

/// Builds the domain and runs the cross-field checks.
void finalize_config(ExperimentConfig& config);

/// Defaults, then `text`, then finalize_config.
ExperimentConfig parse_config(std::string_view text);

std::string read_text_file(const std::string& path);

/// Cross-field checks (positivity, ranges, grid/domain compatibility).
void validate(const ExperimentConfig& config);

/// Inline domain syntax, e.g. "ball:radius=1;center=0,0,0",
/// "annulus:r_in=1;r_out=2", "balls:radius=1;centers=-3,0,0/3,0,0",
/// "box:half_widths=1,1,1".
std::map<std::string, std::string> parse_domain_params(std::string_view text);
Domain build_domain(const std::map<std::string, std::string>& params);
Domain parse_domain(std::string_view text);

Discretization make_discretization(const ExperimentConfig& config);

std::vector<double> parse_list(std::string_view text);

/// Shortest-roundtrip-safe formatting at 17 significant digits.
std::string format_double(double x);

struct RunReport {
  std::string command;
  nlohmann::ordered_json json;
  std::string csv;
  std::vector<std::string> failures;
  int exit_code = 0;
};

/// Exit codes of the command-line contract.
enum ExitCode : int { kPass = 0, kCheckFailure = 1, kSolverFailure = 2, kConfigError = 3 };

int exit_code_for(ErrorKind kind);

/// Subcommands: eig, semilinear, sweep, hks, neg-scan, decay-fit, and
/// verify with `check` one of faber-krahn, hks, nodal, symmetry, pohozaev,
/// decay, sweep, uniqueness.
RunReport run(const ExperimentConfig& config, const std::string& command,
              const std::string& check = "");

/// Writes the JSON report to `output.path` (or stdout when empty) and the
/// CSV next to it with extension .csv.
void emit(const RunReport& report, const ExperimentConfig& config);

}  // namespace qomega

#endif  // QOMEGA_CLI_IO_HPP
