// tcap: transmission-capacity lab command line.
//
//   tcap analytic|simulate|sweep|validate [--config FILE] [overrides...]

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tcap/cli.hpp"

namespace {

struct Overrides {
  std::optional<std::string> config;
  std::vector<std::string> schemes;
  std::optional<int> m, n, k;
  std::optional<double> alpha, beta, epsilon, distance, rho, eta, lambda, snr_db, tolerance;
  std::optional<std::uint64_t> trials, seed;
  std::optional<std::string> mode, out, format, grid;
};

void add_common(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config, "INI experiment file");
  app.add_option("--scheme", o.schemes, "scheme name (repeatable or comma separated)")
      ->delimiter(',');
  app.add_option("--m", o.m, "transmit antennas");
  app.add_option("--n", o.n, "receive antennas per receiver");
  app.add_option("--k", o.k, "receivers per transmitter");
  app.add_option("--alpha", o.alpha, "path-loss exponent (> 2)");
  app.add_option("--beta", o.beta, "SINR target, linear");
  app.add_option("--epsilon", o.epsilon, "outage constraint in (0, 1)");
  app.add_option("--distance", o.distance, "link distance D in meters");
  app.add_option("--rho", o.rho, "transmit SNR rho, linear");
  app.add_option("--eta", o.eta, "noise power eta, linear");
  app.add_option("--snr-db", o.snr_db, "sets rho / eta from an SNR in dB");
  app.add_option("--lambda", o.lambda, "density per m^2 (simulate: estimate outage here)");
  app.add_option("--trials", o.trials, "Monte Carlo trials");
  app.add_option("--seed", o.seed, "64-bit seed");
  app.add_option("--tolerance", o.tolerance, "relative bisection tolerance");
  app.add_option("--grid", o.grid, "antenna grid, e.g. 2x2x2,4x4x4");
  app.add_option("--mode", o.mode, "analytic|mc|both");
  app.add_option("--out", o.out, "output path (default: stdout)");
  app.add_option("--format", o.format, "csv|json");
}

tcap::cli::ExperimentConfig build_config(const Overrides& o) {
  using tcap::cli::ConfigError;
  tcap::cli::ExperimentConfig c;
  if (o.config) c = tcap::cli::load_config(*o.config);

  // Reuse the file parser for the enumerated values so both paths accept the
  // same spellings.
  std::string extra;
  if (!o.schemes.empty()) {
    extra += "schemes = ";
    for (std::size_t i = 0; i < o.schemes.size(); ++i) extra += (i ? "," : "") + o.schemes[i];
    extra += "\n";
  }
  if (o.grid) extra += "grid = " + *o.grid + "\n";
  if (o.mode) extra += "mode = " + *o.mode + "\n";
  if (o.format) extra += "format = " + *o.format + "\n";
  if (!extra.empty()) {
    const auto parsed = tcap::cli::parse_config(extra);
    if (!o.schemes.empty()) c.schemes = parsed.schemes;
    if (o.grid) c.grid = parsed.grid;
    if (o.mode) c.mode = parsed.mode;
    if (o.format) c.format = parsed.format;
  }

  auto& p = c.params;
  if (o.m) p.M = *o.m;
  if (o.n) p.N = *o.n;
  if (o.k) p.K = *o.k;
  if (o.alpha) p.alpha = *o.alpha;
  if (o.beta) p.beta = *o.beta;
  if (o.epsilon) p.epsilon = *o.epsilon;
  if (o.distance) p.distance = *o.distance;
  if (o.rho) p.rho = *o.rho;
  if (o.eta) p.eta = *o.eta;
  if (o.snr_db) tcap::cli::apply_snr_db(p, *o.snr_db);
  if (o.lambda) c.lambda = *o.lambda;
  if (o.trials) c.trials = *o.trials;
  if (o.seed) c.seed = *o.seed;
  if (o.tolerance) c.tolerance = *o.tolerance;
  if (o.out) c.out = *o.out;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmission capacity of SDMA ad hoc networks"};
  app.require_subcommand(1);
  Overrides o;
  auto* analytic = app.add_subcommand("analytic", "closed-form densities and exponents");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo outage or density");
  auto* sweep = app.add_subcommand("sweep", "antenna sweep with log-log slopes");
  auto* validate = app.add_subcommand("validate", "identity and distribution checks");
  for (auto* sub : {analytic, simulate, sweep, validate}) add_common(*sub, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tcap::cli::kExitConfig;
  }

  tcap::cli::ExperimentConfig config;
  try {
    config = build_config(o);
  } catch (const tcap::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return tcap::cli::kExitConfig;
  }

  if (analytic->parsed()) return tcap::cli::cmd_analytic(config, std::cout, std::cerr);
  if (simulate->parsed()) return tcap::cli::cmd_simulate(config, std::cout, std::cerr);
  if (sweep->parsed()) return tcap::cli::cmd_sweep(config, std::cout, std::cerr);
  return tcap::cli::cmd_validate(config, std::cout, std::cerr);
}
