// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/cli_io.hpp"

#include "qomega/eigensolve.hpp"
#include "qomega/semilinear.hpp"
#include "qomega/verify.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace qomega {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    fail(ErrorKind::config, key + ": expected a number, got '" + t + "'");
  return v;
}

long long to_integer(const std::string& key, std::string_view text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    fail(ErrorKind::config, key + ": expected an integer, got '" + t + "'");
  return v;
}

int to_int(const std::string& key, std::string_view text) {
  const long long v = to_integer(key, text);
  require(v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max(),
          ErrorKind::config, key + ": integer out of range");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, std::string_view text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  fail(ErrorKind::config, key + ": expected true or false, got '" + t + "'");
}

std::vector<double> to_list(const std::string& key, std::string_view text) {
  try {
    return parse_list(text);
  } catch (const Error& e) {
    fail(ErrorKind::config, key + ": " + e.what());
  }
}

VectorXd to_point(const std::string& key, std::string_view text) {
  const auto v = to_list(key, text);
  require(!v.empty(), ErrorKind::config, key + ": empty point");
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"grid.kind",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "box") c.grid_kind = GridKind::box;
         else if (v == "radial") c.grid_kind = GridKind::radial;
         else fail(ErrorKind::config, k + ": expected box or radial, got '" + v + "'");
       }},
      {"grid.L", [](auto& c, auto& k, auto& v) { c.grid_L = to_double(k, v); }},
      {"grid.n", [](auto& c, auto& k, auto& v) { c.grid_n = to_int(k, v); }},
      {"grid.h", [](auto& c, auto& k, auto& v) { c.grid_h = to_double(k, v); }},
      {"radial.m", [](auto& c, auto& k, auto& v) { c.radial_m = to_int(k, v); }},
      {"radial.r_max", [](auto& c, auto& k, auto& v) { c.radial_r_max = to_double(k, v); }},
      {"solver.tol", [](auto& c, auto& k, auto& v) { c.solver_tol = to_double(k, v); }},
      {"solver.max_iter", [](auto& c, auto& k, auto& v) { c.solver_max_iter = to_int(k, v); }},
      {"eig.k", [](auto& c, auto& k, auto& v) { c.eig_k = to_int(k, v); }},
      {"semilinear.p", [](auto& c, auto& k, auto& v) { c.p = to_double(k, v); }},
      {"sweep.p_list", [](auto& c, auto& k, auto& v) { c.p_list = to_list(k, v); }},
      {"seed",
       [](auto& c, auto& k, auto& v) {
         const long long s = to_integer(k, v);
         require(s >= 0, ErrorKind::config, k + ": must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"uniqueness.n_starts", [](auto& c, auto& k, auto& v) { c.n_starts = to_int(k, v); }},
      {"fit.r_lo", [](auto& c, auto& k, auto& v) { c.fit_r_lo = to_double(k, v); }},
      {"fit.r_hi", [](auto& c, auto& k, auto& v) { c.fit_r_hi = to_double(k, v); }},
      {"fit.model",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         require(v == "linear" || v == "semilinear", ErrorKind::config,
                 k + ": expected linear or semilinear, got '" + v + "'");
         c.fit_model = v;
       }},
      {"hks.volume", [](auto& c, auto& k, auto& v) { c.hks_volume = to_double(k, v); }},
      {"hks.separations", [](auto& c, auto& k, auto& v) { c.hks_separations = to_list(k, v); }},
      {"hks.h", [](auto& c, auto& k, auto& v) { c.hks_h = to_double(k, v); }},
      {"scan.L_list", [](auto& c, auto& k, auto& v) { c.scan_L = to_list(k, v); }},
      {"output.path", [](auto& c, auto&, auto& v) { c.output_path = v; }},
      {"output.fields", [](auto& c, auto&, auto& v) { c.field_prefix = v; }},
      {"output.timings", [](auto& c, auto& k, auto& v) { c.timings = to_bool(k, v); }},
  };
  return table;
}

const std::vector<std::string> kDomainKeys = {"kind",    "dim",     "center",     "radius",
                                              "r_in",    "r_out",   "centers",    "half_widths",
                                              "overlap"};

}  // namespace

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.empty()) return out;
  for (const std::string& item : split(t, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    require(ec == std::errc() && ptr == item.data() + item.size() && !item.empty(),
            ErrorKind::parse, "bad list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void set_config_key(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key.rfind("domain.", 0) == 0) {
    const std::string sub = key.substr(7);
    require(std::find(kDomainKeys.begin(), kDomainKeys.end(), sub) != kDomainKeys.end(),
            ErrorKind::unknown_key, "unknown key '" + key + "'");
    if (sub == "kind") config.domain_params.clear();
    config.domain_params[sub] = value;
    return;
  }
  const auto& table = setters();
  const auto it = table.find(key);
  require(it != table.end(), ErrorKind::unknown_key, "unknown key '" + key + "'");
  it->second(config, key, value);
}

void apply_config_text(ExperimentConfig& config, std::string_view text) {
  struct Entry {
    int line;
    std::string key, value;
  };
  std::vector<Entry> entries;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected 'key = value'");
    Entry e{line_no, trim(std::string_view(t).substr(0, eq)),
            trim(std::string_view(t).substr(eq + 1))};
    if (e.key.empty())
      fail(ErrorKind::parse, "line " + std::to_string(line_no) + ": missing key");
    entries.push_back(std::move(e));
  }
  std::stable_partition(entries.begin(), entries.end(),
                        [](const Entry& e) { return e.key == "domain.kind"; });
  for (const Entry& e : entries) {
    try {
      set_config_key(config, e.key, e.value);
    } catch (const Error& err) {
      throw Error(err.kind(), "line " + std::to_string(e.line) + ": " + err.what());
    }
  }
}

std::map<std::string, std::string> parse_domain_params(std::string_view text) {
  const std::string t = trim(text);
  const auto colon = t.find(':');
  std::map<std::string, std::string> params;
  params["kind"] = trim(std::string_view(t).substr(0, colon));
  if (colon == std::string::npos) return params;
  for (const std::string& item : split(std::string_view(t).substr(colon + 1), ';')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    require(eq != std::string::npos, ErrorKind::parse,
            "domain entry '" + item + "' is not key=value");
    const std::string key = trim(std::string_view(item).substr(0, eq));
    require(std::find(kDomainKeys.begin(), kDomainKeys.end(), key) != kDomainKeys.end(),
            ErrorKind::unknown_key, "unknown domain key '" + key + "'");
    params[key] = trim(std::string_view(item).substr(eq + 1));
  }
  return params;
}

Domain build_domain(const std::map<std::string, std::string>& params) {
  const auto kind_it = params.find("kind");
  require(kind_it != params.end(), ErrorKind::config, "domain.kind is required");
  const std::string& kind = kind_it->second;
  std::vector<std::string> allowed;
  if (kind == "ball") allowed = {"dim", "center", "radius"};
  else if (kind == "annulus") allowed = {"dim", "center", "r_in", "r_out"};
  else if (kind == "balls") allowed = {"radius", "centers", "overlap"};
  else if (kind == "box") allowed = {"center", "half_widths"};
  else fail(ErrorKind::config, "domain.kind: unknown shape '" + kind + "'");
  for (const auto& [k, v] : params) {
    if (k == "kind") continue;
    require(std::find(allowed.begin(), allowed.end(), k) != allowed.end(), ErrorKind::config,
            "domain." + k + ": not a parameter of " + kind);
  }
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    const auto it = params.find(k);
    if (it == params.end()) return std::nullopt;
    return it->second;
  };
  auto number = [&](const std::string& k, std::optional<double> fallback = std::nullopt) {
    const auto v = get(k);
    if (!v) {
      require(fallback.has_value(), ErrorKind::config, "domain." + k + " is required");
      return *fallback;
    }
    return to_double("domain." + k, *v);
  };
  int dim = 3;
  if (const auto d = get("dim")) dim = to_int("domain.dim", *d);
  VectorXd center = VectorXd::Zero(dim);
  if (const auto c = get("center")) {
    center = to_point("domain.center", *c);
    require(!get("dim") || center.size() == dim, ErrorKind::config,
            "domain.center: dimension does not match domain.dim");
  }
  try {
    if (kind == "ball") return Domain::ball(center, number("radius"));
    if (kind == "annulus") return Domain::annulus(center, number("r_in"), number("r_out"));
    if (kind == "box") {
      const auto hw = get("half_widths");
      require(hw.has_value(), ErrorKind::config, "domain.half_widths is required");
      return Domain::box(center.size() == 3 ? center : VectorXd::Zero(3),
                         to_point("domain.half_widths", *hw));
    }
    const auto cs = get("centers");
    require(cs.has_value(), ErrorKind::config, "domain.centers is required");
    const double r = number("radius");
    std::vector<Ball> balls;
    for (const std::string& p : split(*cs, '/')) balls.push_back(Ball{to_point("domain.centers", p), r});
    bool overlap = false;
    if (const auto o = get("overlap")) overlap = to_bool("domain.overlap", *o);
    return Domain::union_of_balls(std::move(balls), overlap);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_parameter) fail(ErrorKind::config, std::string("domain: ") + e.what());
    throw;
  }
}

Domain parse_domain(std::string_view text) { return build_domain(parse_domain_params(text)); }

void validate(const ExperimentConfig& c) {
  auto positive = [](bool ok, const std::string& key) {
    require(ok, ErrorKind::config, key + ": must be positive");
  };
  positive(c.grid_L > 0.0 && std::isfinite(c.grid_L), "grid.L");
  positive(c.grid_n > 0, "grid.n");
  if (c.grid_h) positive(*c.grid_h > 0.0 && *c.grid_h < c.grid_L, "grid.h");
  positive(c.radial_m > 0, "radial.m");
  positive(c.radial_r_max > 0.0, "radial.r_max");
  positive(c.solver_tol > 0.0 && c.solver_tol < 1.0, "solver.tol");
  positive(c.solver_max_iter > 0, "solver.max_iter");
  positive(c.eig_k > 0, "eig.k");
  positive(c.n_starts > 0, "uniqueness.n_starts");
  positive(c.hks_h > 0.0, "hks.h");
  require(c.hks_volume >= 0.0, ErrorKind::config, "hks.volume: must be nonnegative");
  const int dim = c.domain.dim();
  require(c.p > 1.0 && c.p < critical_exponent(dim) && c.p != 2.0, ErrorKind::config,
          "semilinear.p: must lie in (1, 2*) minus {2}");
  for (double p : c.p_list)
    require(p > 1.0 && p < critical_exponent(dim) && p != 2.0, ErrorKind::config,
            "sweep.p_list: entries must lie in (1, 2*) minus {2}");
  require(c.fit_r_lo >= 0.0 && c.fit_r_hi > c.fit_r_lo, ErrorKind::config,
          "fit.r_lo: window must satisfy 0 <= r_lo < r_hi");
  for (double L : c.scan_L) positive(L > 0.0, "scan.L_list");
  if (c.grid_kind == GridKind::radial) {
    require(c.domain.is_centered_radial(), ErrorKind::config,
            "grid.kind: radial grids need a centered ball or annulus");
    require(c.radial_r_max > c.domain.circumscribing_radius(), ErrorKind::config,
            "radial.r_max: must exceed the domain radius");
  } else {
    require(dim == 3, ErrorKind::config, "grid.kind: box grids are three-dimensional");
    const double reach = c.domain.circumscribing_radius();
    require(c.grid_L > reach, ErrorKind::config, "grid.L: box must contain the domain");
  }
}

void finalize_config(ExperimentConfig& config) {
  config.domain = build_domain(config.domain_params);
  validate(config);
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  apply_config_text(config, text);
  finalize_config(config);
  return config;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Discretization make_discretization(const ExperimentConfig& c) {
  if (c.grid_kind == GridKind::radial)
    return Discretization::radial(build_radial_grid(c.domain.dim(), c.radial_r_max, c.radial_m),
                                  c.domain);
  if (c.grid_h) return Discretization::box(build_box_grid(Vector3d::Constant(c.grid_L), *c.grid_h), c.domain);
  return Discretization::box(build_box_grid(c.grid_L, c.grid_n), c.domain);
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter:
    case ErrorKind::unsupported_shape:
    case ErrorKind::unsupported_model:
    case ErrorKind::config:
    case ErrorKind::unknown_key:
    case ErrorKind::parse:
    case ErrorKind::io:
      return kConfigError;
    default:
      return kSolverFailure;
  }
}

// ---- run ----------------------------------------------------------------------------

namespace {

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json j;
  j["domain"] = c.domain.describe();
  if (c.grid_kind == GridKind::radial) {
    j["grid"] = {{"kind", "radial"}, {"m", c.radial_m}, {"r_max", c.radial_r_max}};
  } else {
    ordered_json g = {{"kind", "box"}, {"L", c.grid_L}};
    if (c.grid_h) g["h"] = *c.grid_h;
    else g["n"] = c.grid_n;
    j["grid"] = g;
  }
  j["solver"] = {{"tol", c.solver_tol}, {"max_iter", c.solver_max_iter}};
  j["seed"] = c.seed;
  return j;
}

ordered_json fit_json(const FitReport& f) {
  return {{"model", to_string(f.model)},     {"fitted_rate", f.fitted_rate},
          {"reference_rate", f.reference_rate}, {"relative_error", f.relative_error()},
          {"r_lo", f.r_lo},                  {"r_hi", f.r_hi},
          {"r_squared", f.r_squared},        {"n_samples", f.n_samples},
          {"amplitude", f.amplitude}};
}

ordered_json comparison_json(const ComparisonReport& r) {
  return {{"kind", to_string(r.kind)}, {"lhs", r.lhs},           {"rhs", r.rhs},
          {"margin", r.margin},        {"tolerance", r.tolerance}, {"verdict", r.verdict},
          {"equality", r.equality},    {"note", r.note}};
}

std::string csv_row(std::initializer_list<double> values) {
  std::string s;
  bool first = true;
  for (double v : values) {
    if (!first) s += ',';
    s += format_double(v);
    first = false;
  }
  return s + '\n';
}

void dump_field(const ExperimentConfig& c, const std::string& name, const ScalarField& f) {
  if (c.field_prefix.empty()) return;
  write_csv(c.field_prefix + name + ".csv", f);
}

VectorXd domain_center(const Domain& d) {
  VectorXd c = d.centroid();
  if (c.size() < 3) c.conservativeResizeLike(VectorXd::Zero(3));
  return c;
}

GroundState ground_state(const ExperimentConfig& c, const Discretization& disc, double p) {
  if (disc.is_radial()) {
    if (p > 2.0) return radial_ground_state(c.domain, p, c.radial_m, c.radial_r_max);
  }
  PencilOptions po;
  po.tol = c.solver_tol;
  po.max_iter = c.solver_max_iter;
  const EigenBasis eig = solve_pencil(disc, po);
  const GroundState g = least_energy_descent(disc, p, eig[0].phi.values, c.seed);
  return p > 2.0 ? newton_refine(disc, g) : g;
}

void eig_command(const ExperimentConfig& c, RunReport& rep) {
  const Discretization disc = make_discretization(c);
  PencilOptions po;
  po.k_max = c.eig_k;
  po.tol = c.solver_tol;
  po.max_iter = c.solver_max_iter;
  po.seed = c.seed + 1;
  const EigenBasis basis = solve_pencil(disc, po);
  rep.csv = "k,lambda,rayleigh_residual,gram_offdiag_max\n";
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (i == j) continue;
      const auto a = static_cast<Index>(i), b = static_cast<Index>(j);
      off = std::max({off, std::abs(basis.gram_d(a, b)),
                      std::abs(basis.gram_a(a, b)) /
                          std::sqrt(basis[i].lambda * basis[j].lambda)});
    }
    rep.csv += csv_row({static_cast<double>(basis[i].k), basis[i].lambda,
                        basis[i].rayleigh_residual, off});
    rows.push_back({{"k", basis[i].k},
                    {"lambda", basis[i].lambda},
                    {"rayleigh_residual", basis[i].rayleigh_residual},
                    {"residual", basis[i].residual},
                    {"multiplicity", basis.multiplicity[i]},
                    {"gram_offdiag_max", off}});
    dump_field(c, "phi" + std::to_string(basis[i].k), basis[i].phi);
  }
  rep.json["eigenpairs"] = rows;
  rep.json["iterations"] = basis.iterations;
}

void semilinear_command(const ExperimentConfig& c, RunReport& rep) {
  const Discretization disc = make_discretization(c);
  const GroundState g = ground_state(c, disc, c.p);
  const SupNorm s = sup_norm_scaling(g);
  rep.json["p"] = g.p;
  rep.json["alpha_p"] = g.alpha;
  rep.json["log_amp"] = g.log_amp;
  rep.json["residual"] = g.residual;
  rep.json["sup_norm_pow"] = s.m_pow;
  rep.json["ln_sup"] = s.log_m;
  rep.json["iterations"] = g.iterations;
  rep.json["newton_iterations"] = g.newton_iterations;
  dump_field(c, "v", g.v);
}

ordered_json sweep_json(const SweepResult& s, std::string& csv) {
  csv = "p,alpha_p,gap_to_lambda1,const_estimate,sup_pow,ln_sup,min_abs_lin_eig,approx_kernel_dim\n";
  ordered_json rows = ordered_json::array();
  for (const SweepRow& r : s.rows) {
    csv += format_double(r.p) + ',' + format_double(r.alpha_p) + ',' +
           format_double(r.gap_to_lambda1) + ',' + format_double(r.const_estimate) + ',' +
           format_double(r.sup_pow) + ',' + format_double(r.ln_sup) + ',' +
           format_double(r.min_abs_lin_eig) + ',' + std::to_string(r.approx_kernel_dim) + '\n';
    ordered_json row = {{"p", r.p},
                        {"alpha_p", r.alpha_p},
                        {"gap_to_lambda1", r.gap_to_lambda1},
                        {"const_estimate", r.const_estimate},
                        {"sup_pow", r.sup_pow},
                        {"ln_sup", r.ln_sup},
                        {"approx_kernel_dim", r.approx_kernel_dim},
                        {"negative_count", r.negative_count},
                        {"residual", r.residual}};
    if (std::isfinite(r.min_abs_lin_eig)) row["min_abs_lin_eig"] = r.min_abs_lin_eig;
    else row["min_abs_lin_eig"] = nullptr;
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  return {{"lambda1", s.lambda1}, {"target_constant", s.target_constant}, {"rows", rows}};
}

SweepResult run_sweep(const ExperimentConfig& c, RunReport& rep) {
  require(!c.p_list.empty(), ErrorKind::config, "sweep.p_list: must not be empty");
  const Discretization disc = make_discretization(c);
  SweepOptions so;
  so.eig_tol = c.solver_tol;
  so.seed = c.seed;
  const SweepResult s = p_sweep(disc, c.p_list, so);
  rep.json["sweep"] = sweep_json(s, rep.csv);
  for (const SweepRow& r : s.rows)
    if (!r.error.empty()) rep.failures.push_back("p=" + format_double(r.p) + ": " + r.error);
  return s;
}

std::vector<HksRow> run_hks(const ExperimentConfig& c, RunReport& rep) {
  HksOptions o;
  o.h = c.hks_h;
  o.tol = std::max(c.solver_tol, 1e-10);
  const double vol = c.hks_volume > 0.0 ? c.hks_volume : 2.0 * unit_ball_volume(3);
  const auto rows = hks_sequence(vol, c.hks_separations, o);
  rep.csv = "d,lambda2,reference,exact_reference,gap,hks_verdict,second_bound_verdict\n";
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const HksRow& r = rows[i];
    rep.csv += format_double(r.separation) + ',' + format_double(r.lambda2) + ',' +
               format_double(r.reference) + ',' + format_double(r.exact_reference) + ',' +
               format_double(r.gap) + ',' + (r.hks.verdict ? "pass" : "fail") + ',' +
               (r.second_bound.verdict ? "pass" : "fail") + '\n';
    arr.push_back({{"separation", r.separation},
                   {"lambda2", r.lambda2},
                   {"reference", r.reference},
                   {"exact_reference", r.exact_reference},
                   {"gap", r.gap},
                   {"hks", comparison_json(r.hks)},
                   {"second_bound", comparison_json(r.second_bound)}});
    if (!r.hks.verdict) rep.failures.push_back("hks gap not positive at d=" + format_double(r.separation));
    if (!r.second_bound.verdict)
      rep.failures.push_back("second eigenvalue bound fails at d=" + format_double(r.separation));
    if (i > 0 && !(r.gap < rows[i - 1].gap))
      rep.failures.push_back("gap not decreasing at d=" + format_double(r.separation));
  }
  rep.json["volume"] = vol;
  rep.json["rows"] = arr;
  return rows;
}

void neg_scan_command(const ExperimentConfig& c, RunReport& rep) {
  const auto rows = negative_spectrum_scan(c.domain, c.scan_L, c.grid_n, std::max(c.solver_tol, 1e-10));
  rep.csv = "L,lambda_neg,nodes_per_axis\n";
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    rep.csv += format_double(r.L) + ',' + format_double(r.lambda_neg) + ',' +
               std::to_string(r.nodes_per_axis) + '\n';
    arr.push_back({{"L", r.L}, {"lambda_neg", r.lambda_neg}, {"nodes_per_axis", r.nodes_per_axis}});
  }
  rep.json["rows"] = arr;
}

FitReport run_fit(const ExperimentConfig& c) {
  const Discretization disc = make_discretization(c);
  const VectorXd center = disc.is_radial() ? VectorXd() : domain_center(c.domain);
  if (c.fit_model == "semilinear") {
    return fit_semilinear_decay(ground_state(c, disc, c.p), c.fit_r_lo, c.fit_r_hi, center);
  }
  const EigenBasis eig = solve_pencil(disc, 1, c.solver_tol);
  return fit_linear_decay(eig[0].phi, eig[0].lambda, c.fit_r_lo, c.fit_r_hi, center);
}

void set_check(RunReport& rep, double lhs, double rhs, double margin, bool verdict) {
  rep.json["lhs"] = lhs;
  rep.json["rhs"] = rhs;
  rep.json["margin"] = margin;
  rep.json["verdict"] = verdict;
}

void verify_command(const ExperimentConfig& c, const std::string& check, RunReport& rep) {
  rep.json["check"] = check;
  if (check == "faber-krahn") {
    FaberKrahnOptions o;
    o.h = c.grid_h.value_or(0.1);
    o.tol = std::max(c.solver_tol, 1e-10);
    const ComparisonReport r = faber_krahn(c.domain, o);
    set_check(rep, r.lhs, r.rhs, r.margin, r.verdict);
    rep.json["tolerance"] = r.tolerance;
    rep.json["equality"] = r.equality;
    rep.json["note"] = r.note;
    if (!r.verdict) rep.failures.push_back("faber-krahn inequality fails");
  } else if (check == "hks") {
    const auto rows = run_hks(c, rep);
    set_check(rep, rows.back().lambda2, rows.back().reference, rows.back().gap, rep.failures.empty());
  } else if (check == "nodal") {
    const Discretization disc = make_discretization(c);
    const EigenBasis basis = solve_pencil(disc, c.eig_k, c.solver_tol);
    ordered_json counts = ordered_json::array();
    int worst = std::numeric_limits<int>::min();
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const int n = count_nodal_domains(basis[i].phi);
      const int k = basis[i].k;
      counts.push_back({{"k", k}, {"lambda", basis[i].lambda}, {"nodal_domains", n}});
      worst = std::max(worst, n - k);
      if (n > k) rep.failures.push_back("phi_" + std::to_string(k) + " has too many nodal domains");
      if (k == 1 && n != 1) rep.failures.push_back("phi_1 is not single-signed");
      if (k >= 2 && n < 2) rep.failures.push_back("phi_" + std::to_string(k) + " does not change sign");
    }
    rep.json["counts"] = counts;
    set_check(rep, worst, 0.0, -worst, rep.failures.empty());
  } else if (check == "symmetry") {
    const Discretization disc = make_discretization(c);
    const EigenBasis basis = solve_pencil(disc, 2, c.solver_tol);
    const double radial = check_radial(basis[0].phi, c.domain);
    rep.json["radial_deviation"] = radial;
    double worst = radial / 5e-3;
    if (radial >= 5e-3) rep.failures.push_back("phi_1 radial deviation above 5e-3");
    if (!disc.is_radial()) {
      const FoliatedReport f = check_foliated_schwarz(basis[1].phi, c.domain, -1.0, 20, c.seed + 7);
      rep.json["foliated"] = {{"axis", {f.axis[0], f.axis[1], f.axis[2]}},
                              {"axial_dev", f.axial_dev},
                              {"monotonicity_violation", f.monotonicity_violation},
                              {"reflection_violation", f.reflection_violation},
                              {"directions", f.directions}};
      const double m = std::max({f.axial_dev, f.monotonicity_violation, f.reflection_violation});
      worst = std::max(worst, m / 1e-2);
      if (m >= 1e-2) rep.failures.push_back("phi_2 foliated Schwarz metrics above 1e-2");
    }
    set_check(rep, worst, 1.0, 1.0 - worst, rep.failures.empty());
  } else if (check == "pohozaev") {
    const Discretization disc = make_discretization(c);
    const EigenBasis basis = solve_pencil(disc, 1, c.solver_tol);
    const PohozaevReport e = pohozaev_residual(disc, basis[0].phi, Nonlinearity::eigen(basis[0].lambda));
    ordered_json j = {{"eigen", {{"residual", e.residual},
                                 {"relative", e.relative},
                                 {"boundary_term", e.boundary_term},
                                 {"energy_term", e.energy_term},
                                 {"potential_term", e.potential_term}}}};
    double min_boundary = e.boundary_term;
    if (c.p > 2.0) {
      const PohozaevReport s = pohozaev_residual(disc, ground_state(c, disc, c.p));
      j["power"] = {{"p", c.p},
                    {"residual", s.residual},
                    {"relative", s.relative},
                    {"boundary_term", s.boundary_term},
                    {"energy_term", s.energy_term},
                    {"potential_term", s.potential_term}};
      min_boundary = std::min(min_boundary, s.boundary_term);
    }
    rep.json["pohozaev"] = j;
    if (!(min_boundary > 0.0)) rep.failures.push_back("boundary term is not positive");
    set_check(rep, min_boundary, 0.0, min_boundary, rep.failures.empty());
  } else if (check == "decay") {
    const FitReport f = run_fit(c);
    double tol = 0.05;
    if (f.model == DecayModel::serrin_log) tol = 0.10;
    if (f.model == DecayModel::linear_exp) tol = c.grid_kind == GridKind::radial ? 0.01 : 0.03;
    rep.json["fit"] = fit_json(f);
    rep.json["tolerance"] = tol;
    if (!(f.relative_error() <= tol)) rep.failures.push_back("decay rate outside tolerance");
    set_check(rep, f.fitted_rate, f.reference_rate, tol - f.relative_error(), rep.failures.empty());
  } else if (check == "sweep") {
    const SweepResult s = run_sweep(c, rep);
    std::vector<const SweepRow*> rows;
    for (const SweepRow& r : s.rows)
      if (r.error.empty() && r.p > 2.0) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(), [](auto a, auto b) { return a->p > b->p; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (!(std::abs(rows[i]->gap_to_lambda1) < std::abs(rows[i - 1]->gap_to_lambda1)))
        rep.failures.push_back("alpha_p does not approach lambda_1 at p=" + format_double(rows[i]->p));
    }
    for (const SweepRow* r : rows)
      if (!(r->min_abs_lin_eig > kDefaultKernelTol))
        rep.failures.push_back("linearized operator near-singular at p=" + format_double(r->p));
    const double est = rows.empty() ? 0.0 : rows.back()->const_estimate;
    set_check(rep, est, s.target_constant, est - s.target_constant, rep.failures.empty());
  } else if (check == "uniqueness") {
    const Discretization disc = make_discretization(c);
    UniquenessOptions o;
    o.seed = c.seed + 11;
    const UniquenessReport u = multistart_uniqueness(disc, c.p, c.n_starts, o);
    rep.json["uniqueness"] = {{"n_distinct", u.n_distinct},
                              {"max_pairwise_dist", u.max_pairwise_dist},
                              {"n_failed", u.n_failed},
                              {"n_least", u.n_least},
                              {"group_order", u.group_order},
                              {"best_alpha", u.best_alpha},
                              {"alphas", u.alphas}};
    if (u.n_distinct != 1) rep.failures.push_back("more than one least energy orbit");
    set_check(rep, u.n_distinct, 1.0, 1.0 - u.n_distinct, rep.failures.empty());
  } else {
    fail(ErrorKind::config, "verify: unknown check '" + check + "'");
  }
}

}  // namespace

RunReport run(const ExperimentConfig& config, const std::string& command, const std::string& check) {
  RunReport rep;
  rep.command = command;
  rep.json["command"] = command;
  rep.json["version"] = kVersion;
  rep.json["inputs"] = config_json(config);
  const auto start = std::chrono::steady_clock::now();
  try {
    if (command == "eig") eig_command(config, rep);
    else if (command == "semilinear") semilinear_command(config, rep);
    else if (command == "sweep") run_sweep(config, rep);
    else if (command == "hks") run_hks(config, rep);
    else if (command == "neg-scan") neg_scan_command(config, rep);
    else if (command == "decay-fit") rep.json["fit"] = fit_json(run_fit(config));
    else if (command == "verify") verify_command(config, check, rep);
    else fail(ErrorKind::config, "unknown command '" + command + "'");
    rep.exit_code = rep.failures.empty() ? kPass : kCheckFailure;
    if (command == "sweep" && !rep.failures.empty()) rep.exit_code = kSolverFailure;
  } catch (const Error& e) {
    rep.failures.push_back(std::string(to_string(e.kind())) + ": " + e.what());
    rep.exit_code = exit_code_for(e.kind());
  }
  if (config.timings)
    rep.json["seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.json["failures"] = rep.failures;
  rep.json["exit_code"] = rep.exit_code;
  return rep;
}

void emit(const RunReport& report, const ExperimentConfig& config) {
  const std::string text = report.json.dump(2) + '\n';
  if (config.output_path.empty()) {
    std::cout << text;
    if (!report.csv.empty()) std::cout << report.csv;
    return;
  }
  std::ofstream json(config.output_path);
  require(json.good(), ErrorKind::io, "cannot write '" + config.output_path + "'");
  json << text;
  if (report.csv.empty()) return;
  std::string csv_path = config.output_path;
  const auto dot = csv_path.rfind('.');
  const auto slash = csv_path.rfind('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) csv_path.erase(dot);
  csv_path += ".csv";
  std::ofstream csv(csv_path);
  require(csv.good(), ErrorKind::io, "cannot write '" + csv_path + "'");
  csv << report.csv;
}

}  // namespace qomega
