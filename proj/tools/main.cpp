// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

// fisherspike: theory tables, Monte Carlo runs and Omega probes for spiked
// Fisher matrices.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fisherspike/config.hpp"
#include "fisherspike/error.hpp"
#include "fisherspike/omega_probe.hpp"
#include "fisherspike/report.hpp"
#include "fisherspike/simulate.hpp"
#include "fisherspike/theory.hpp"

namespace fs = std::filesystem;
using namespace fisherspike;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::string> backend;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool need_config = true) {
  auto* opt = cmd->add_option("--config", f.config, "Run configuration (INI)")->check(CLI::ExistingFile);
  if (need_config) opt->required();
  cmd->add_option("--seed", f.seed, "Override [mc] seed");
  cmd->add_option("--reps", f.reps, "Override [mc] reps")->check(CLI::PositiveNumber);
  cmd->add_option("--backend", f.backend, "Stieltjes backend")
      ->check(CLI::IsMember({"quadrature", "montecarlo"}));
  cmd->add_option("--threads", f.threads, "Worker threads (0: all cores)");
}

ModelConfig load_with_overrides(const std::string& path, const CommonFlags& f) {
  auto config = load_config(path);
  if (f.seed) config.seed = *f.seed;
  if (f.reps) config.reps = *f.reps;
  if (f.backend) {
    config.backend = *f.backend == "quadrature" ? StieltjesBackend::kQuadrature : StieltjesBackend::kMonteCarlo;
  }
  config.backend_options.threads = f.threads;
  config.validate();
  return config;
}

int run_theory(const CommonFlags& f, const std::optional<std::string>& out) {
  const auto config = load_with_overrides(f.config, f);
  const auto table = compute_theory(config);
  const auto text = theory_document(config, table).to_string();
  std::cout << text;
  if (out) write_text(fs::path(*out) / files::kTheory, text);
  return 0;
}

int run_simulate(const CommonFlags& f, const std::string& out) {
  const auto config = load_with_overrides(f.config, f);
  const auto table = compute_theory(config);
  const auto laws = table.laws();
  RunOptions options;
  options.threads = f.threads;
  const auto report = run_mc(config, laws, options);
  write_simulation(out, config, table, report);
  std::cout << "replications: " << report.rep_index.size() << " ok, " << report.failed_reps.size()
            << " failed\n";
  for (const auto& g : report.groups) {
    std::cout << "alpha=" << format_double(g.law.alpha) << " sigma2=" << format_double(g.law.sigma2());
    for (Eigen::Index j = 0; j < g.mean.size(); ++j) {
      std::cout << " var[" << j + 1 << "]=" << format_double(g.covariance(j, j)) << " ks_p[" << j + 1
                << "]=" << format_double(g.ks[static_cast<std::size_t>(j)].p_value);
    }
    std::cout << '\n';
  }
  std::cout << "wrote " << out << '\n';
  return 0;
}

int run_omega(const CommonFlags& f, const std::string& config_b, const std::string& out, std::size_t group,
              const std::optional<double>& lambda) {
  const auto a = load_with_overrides(f.config, f);
  auto b = load_with_overrides(config_b.empty() ? f.config : config_b, f);
  if (config_b.empty()) b.seed = a.seed + 1;
  if (group == 0) throw Error(ErrorCode::kConfig, "--group is 1-based");
  const auto table = compute_theory(a);
  const auto laws = table.laws();
  OmegaProbeOptions options;
  options.group = group - 1;
  options.lambda = lambda;
  options.threads = f.threads;
  const auto report = universality_test(a, b, laws, options);
  const auto doc = universality_document(a, b, report).to_string();
  write_text(fs::path(out) / files::kUniversality, doc);
  write_text(fs::path(out) / files::kOmega, omega_table(report).to_string());
  std::cout << doc;
  return 0;
}

int run_report(const std::string& dir) {
  const auto report = rebuild_simulation(dir);
  std::cout << "rebuilt summary and plots from " << report.rep_index.size() << " replications in " << dir
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiked Fisher matrix theory and simulation"};
  app.require_subcommand(1);

  CommonFlags theory_flags;
  std::optional<std::string> theory_out;
  auto* theory = app.add_subcommand("theory", "Phase map, bulk edges and limit-law parameters");
  add_common(theory, theory_flags);
  theory->add_option("--out", theory_out, "Also write theory.txt into this directory");

  CommonFlags sim_flags;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run with gamma statistics and plot data");
  add_common(simulate, sim_flags);
  simulate->add_option("--out", sim_out, "Output directory")->required();

  CommonFlags omega_flags;
  std::string omega_b;
  std::string omega_out;
  std::size_t omega_group = 1;
  std::optional<double> omega_lambda;
  auto* omega = app.add_subcommand("omega-probe", "Compare Omega entries across two sample laws");
  add_common(omega, omega_flags);
  omega->add_option("--config-b", omega_b, "Second configuration (default: --config with seed + 1)")
      ->check(CLI::ExistingFile);
  omega->add_option("--out", omega_out, "Output directory")->required();
  omega->add_option("--group", omega_group, "Spike group (1-based) whose psi_n is used as lambda");
  omega->add_option("--lambda", omega_lambda, "Explicit evaluation point");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Rebuild summary and plots of a simulate directory");
  report->add_option("--out", report_dir, "Directory written by simulate")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (theory->parsed()) return run_theory(theory_flags, theory_out);
    if (simulate->parsed()) return run_simulate(sim_flags, sim_out);
    if (omega->parsed()) return run_omega(omega_flags, omega_b, omega_out, omega_group, omega_lambda);
    if (report->parsed()) return run_report(report_dir);
  } catch (const Error& e) {
    std::cerr << "fisherspike: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
