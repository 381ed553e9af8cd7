#pragma once

// Experiment configuration, the analytic / simulate / sweep / validate
// commands and CSV / JSON result emission.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tcap/mc_engine.hpp"
#include "tcap/network.hpp"

namespace tcap::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitInconclusive = 4,
};

/// Invalid or unknown configuration entry; key() names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class OutputFormat { Csv, Json };

/// Per-scheme overrides ([SCHEME-NAME] section of the config file).
struct SchemeSection {
  std::vector<DensityMethod> methods;
  sim::SimOptions sim;

  bool operator==(const SchemeSection&) const = default;
};

struct ExperimentConfig {
  NetworkParams params = default_params();
  /// Density at which `simulate` estimates outage; unset means "find lambda_eps".
  std::optional<double> lambda;
  std::vector<Scheme> schemes = {Scheme::DpcMimoUb, Scheme::DpcMiso, Scheme::ZfMiso,
                                 Scheme::ZfAntSel, Scheme::SisoBaseline};
  std::vector<mc::AntennaConfig> grid = {{2, 2, 2}, {4, 4, 4}, {8, 8, 8}, {16, 16, 16}};
  mc::SweepMode mode = mc::SweepMode::Analytic;
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 1;
  double tolerance = 0.02;
  std::uint64_t initial_trials = 10'000;
  std::uint64_t max_trials_per_probe = 1'000'000;
  std::uint64_t trial_budget = 40'000'000;
  std::string out;  // empty: standard output
  OutputFormat format = OutputFormat::Csv;
  std::map<Scheme, SchemeSection> sections;

  static NetworkParams default_params();
  bool operator==(const ExperimentConfig&) const = default;
};

/// Accepts "small-eps", "upper-bound", "lower-bound", "sandwich" (same as
/// lower-bound), "exact-root" and "mc-root".
std::optional<DensityMethod> parse_density_method(std::string_view name);

/// Parses INI text.  Top-level keys hold the experiment; sections named after
/// schemes hold SchemeSection keys.  snr_db, when present, sets rho / eta.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// INI text that parse_config maps back to an equal config.
std::string serialize_config(const ExperimentConfig& config);

/// Throws ConfigError naming the first invalid field.
void validate_config(const ExperimentConfig& config);

/// Sets rho / eta so that rho / eta = 10^{snr_db / 10}; eta = 0 becomes 1.
void apply_snr_db(NetworkParams& params, double snr_db);

/// One output line, shared by every command.
struct ResultRow {
  Scheme scheme = Scheme::SisoBaseline;
  NetworkParams params;
  std::string method;
  std::optional<double> lambda_eps;
  std::optional<double> ase;
  std::optional<Interval> ci;
  std::uint64_t trials = 0;
  std::optional<std::uint64_t> seed;
  bool noise_limited = false;
  std::optional<double> outage;  // mc-outage rows
  std::string error;
};

struct SlopeSummary {
  Scheme scheme;
  std::string method;
  std::optional<double> slope;
  int points;
  double reference;
};

struct ResultSet {
  std::string command;
  std::vector<ResultRow> rows;
  std::vector<SlopeSummary> slopes;
  std::map<Scheme, double> exponents;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool pass() const;
};

/// Test hook: evaluate the reference closed forms at a different alpha than
/// the kernels under test.
struct ValidationFixture {
  std::optional<double> reference_alpha;
};

inline constexpr std::string_view kCsvHeader =
    "scheme,M,N,K,alpha,beta,epsilon,D,rho,eta,lambda_eps,ase,method,ci_low,ci_high,trials,seed";

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

void write_csv(std::ostream& os, const ResultSet& results);
void write_json(std::ostream& os, const ResultSet& results);
void write_report_csv(std::ostream& os, const ValidationReport& report);
void write_report_json(std::ostream& os, const ValidationReport& report);

struct CommandOutcome {
  int exit_code = kExitOk;
  std::string diagnostic;
};

ResultSet run_analytic(const ExperimentConfig& config);
/// Fills `outcome` with kExitInconclusive / kExitNumerical when rows fail.
ResultSet run_simulate(const ExperimentConfig& config, CommandOutcome& outcome);
ResultSet run_sweep(const ExperimentConfig& config, CommandOutcome& outcome);
ValidationReport run_validation(const ExperimentConfig& config,
                                const ValidationFixture& fixture = {});

/// Command entry points: validate the config, run, write config.out (or
/// `fallback` when out is empty) and return the exit code.
int cmd_analytic(const ExperimentConfig& config, std::ostream& fallback, std::ostream& diag);
int cmd_simulate(const ExperimentConfig& config, std::ostream& fallback, std::ostream& diag);
int cmd_sweep(const ExperimentConfig& config, std::ostream& fallback, std::ostream& diag);
int cmd_validate(const ExperimentConfig& config, std::ostream& fallback, std::ostream& diag);

}  // namespace tcap::cli
