// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#include "qomega/cli_io.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Overrides {
  std::string config_path;
  std::string domain;
  std::vector<std::string> assignments;
  std::optional<int> grid_n;
  std::optional<double> grid_L;
  std::optional<double> grid_h;
  std::optional<double> p;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_overrides(CLI::App& app, Overrides& o) {
  app.add_option("-c,--config", o.config_path, "Config file with section.key = value lines");
  app.add_option("--domain", o.domain, "Domain, e.g. ball:radius=1 or annulus:r_in=1;r_out=2");
  app.add_option("--grid-n", o.grid_n, "Box nodes per axis");
  app.add_option("--grid-L", o.grid_L, "Box half-width");
  app.add_option("--grid-h", o.grid_h, "Box spacing (replaces --grid-n)");
  app.add_option("--p", o.p, "Exponent p");
  app.add_option("--seed", o.seed, "Seed for randomized starts");
  app.add_option("--out", o.out, "JSON report path; a CSV is written next to it");
  app.add_option("--set", o.assignments, "Extra key=value assignment (repeatable)");
}

qomega::ExperimentConfig build_config(const Overrides& o) {
  qomega::ExperimentConfig c;
  if (!o.config_path.empty()) qomega::apply_config_text(c, qomega::read_text_file(o.config_path));
  for (const std::string& a : o.assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos)
      qomega::fail(qomega::ErrorKind::parse, "--set expects key=value, got '" + a + "'");
    std::string key = a.substr(0, eq), value = a.substr(eq + 1);
    qomega::set_config_key(c, key, value);
  }
  if (!o.domain.empty()) c.domain_params = qomega::parse_domain_params(o.domain);
  if (o.grid_n) c.grid_n = *o.grid_n;
  if (o.grid_L) c.grid_L = *o.grid_L;
  if (o.grid_h) c.grid_h = *o.grid_h;
  if (o.p) c.p = *o.p;
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.output_path = o.out;
  qomega::finalize_config(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalues and least energy solutions for sign-changing weights"};
  app.set_version_flag("--version", qomega::kVersion);
  app.require_subcommand(1);
  Overrides o;
  std::string check;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"eig", "First eigenpairs of the weighted pencil"},
      {"semilinear", "Least energy solution for exponent p"},
      {"sweep", "Ground states over sweep.p_list"},
      {"hks", "Second eigenvalue of two separating balls"},
      {"neg-scan", "Negative eigenvalue on growing cubes"},
      {"decay-fit", "Decay rate fit of phi_1 or u_p"},
  };
  for (const auto& [name, help] : commands) add_overrides(*app.add_subcommand(name, help), o);
  CLI::App* verify = app.add_subcommand("verify", "Run one property check");
  add_overrides(*verify, o);
  verify->add_option("check", check, "Check name")
      ->required()
      ->check(CLI::IsMember({"faber-krahn", "hks", "nodal", "symmetry", "pohozaev", "decay",
                             "sweep", "uniqueness"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qomega::kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  qomega::ExperimentConfig config;
  try {
    config = build_config(o);
  } catch (const qomega::Error& e) {
    std::cerr << "{\"failures\": [\"" << qomega::to_string(e.kind()) << ": " << e.what()
              << "\"], \"exit_code\": " << qomega::kConfigError << "}\n";
    return qomega::kConfigError;
  }
  const qomega::RunReport report = qomega::run(config, command, check);
  try {
    qomega::emit(report, config);
  } catch (const qomega::Error& e) {
    std::cerr << e.what() << '\n';
    return qomega::exit_code_for(e.kind());
  }
  for (const std::string& f : report.failures) std::cerr << f << '\n';
  return report.exit_code;
}
