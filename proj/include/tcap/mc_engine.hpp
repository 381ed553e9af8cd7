#pragma once

// Monte Carlo outage estimation, stochastic bisection on the density,
// antenna sweeps and goodness-of-fit checks.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcap/channel_sim.hpp"
#include "tcap/network.hpp"
#include "tcap/rng.hpp"

namespace tcap::mc {

struct OutageEstimate {
  Scheme scheme = Scheme::SisoBaseline;
  NetworkParams params;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t trials = 0;
  std::uint64_t outages = 0;
  std::uint64_t seed = 0;

  /// Binomial standard error sqrt(p (1 - p) / n).
  double standard_error() const;
};

/// 95% Wilson score interval of `outages` out of `trials`.
Interval wilson_interval(std::uint64_t outages, std::uint64_t trials);

/// Worker threads used when a call passes workers = 0: TCAP_WORKERS if set,
/// otherwise the hardware concurrency.
int default_workers();

/// Incremental run handle: trial i always uses stream (seed, i), so extending
/// a run from n to 2n trials reuses the first n outcomes unchanged.
class OutageRun {
 public:
  OutageRun(Scheme scheme, const NetworkParams& params, std::uint64_t seed,
            const sim::SimOptions& options = {}, int workers = 0);

  void extend_to(std::uint64_t trials);
  OutageEstimate estimate() const;
  std::uint64_t trials() const { return trials_; }

 private:
  sim::LinkSimulator link_;
  Scheme scheme_;
  NetworkParams params_;
  std::uint64_t seed_;
  int workers_;
  std::uint64_t trials_ = 0;
  std::uint64_t outages_ = 0;
};

/// Fraction of `trials` realizations with SINR < beta.
OutageEstimate estimate_outage(Scheme scheme, const NetworkParams& params, std::uint64_t trials,
                               std::uint64_t seed, const sim::SimOptions& options = {},
                               int workers = 0);

struct BisectionOptions {
  double tolerance = 0.02;  // stop when bracket width / midpoint <= tolerance
  std::uint64_t initial_trials = 10'000;
  std::uint64_t max_trials_per_probe = 1'000'000;
  std::uint64_t trial_budget = 40'000'000;
  /// Starting density; eps / (pi beta^{2/alpha} D^2) when unset.
  std::optional<double> initial_guess;
  sim::SimOptions sim;
  int workers = 0;
};

/// Largest lambda with outage <= epsilon, by bisection on Monte Carlo probes.
/// A probe classifies lambda once its Wilson interval excludes epsilon,
/// doubling the trials up to max_trials_per_probe.  A probe that still
/// straddles epsilon at the cap ends the search at that lambda.  Throws
/// InconclusiveError carrying the current bracket when trial_budget runs out.
DensityResult find_max_density(Scheme scheme, const NetworkParams& params, std::uint64_t seed,
                               const BisectionOptions& options = {});

enum class ProbeVerdict {
  Feasible,    // outage < epsilon with confidence
  Infeasible,  // outage > epsilon with confidence
  Straddle,    // unresolved at the probe's resolution limit
};

using DensityProbe = std::function<ProbeVerdict(double lambda)>;

/// Bisection on lambda driven by `probe`: brackets the root by doubling or
/// halving from `guess`, then halves the bracket until width / midpoint <=
/// tolerance.  A Straddle verdict ends the search at that lambda.  An
/// InconclusiveError thrown by the probe is rethrown with the current bracket.
/// Returns lambda_eps and the final bracket; scheme, ASE and trials are left
/// to the caller.
DensityResult bisect_density(const DensityProbe& probe, double guess, double tolerance);

enum class SweepMode { Analytic, Mc, Both };

struct AntennaConfig {
  int M = 1;
  int N = 1;
  int K = 1;
  bool operator==(const AntennaConfig&) const = default;
};

struct SweepSpec {
  std::vector<Scheme> schemes;
  std::vector<AntennaConfig> grid;
  NetworkParams params;
  SweepMode mode = SweepMode::Analytic;
  std::uint64_t seed = 1;
  /// Analytic methods per scheme; default_method when a scheme is absent.
  std::map<Scheme, std::vector<DensityMethod>> methods;
  std::map<Scheme, sim::SimOptions> sim;
  BisectionOptions bisection;
};

struct SweepRow {
  Scheme scheme = Scheme::SisoBaseline;
  NetworkParams params;
  DensityMethod method = DensityMethod::SmallEps;
  double lambda_eps = 0.0;
  double ase = 0.0;
  bool noise_limited = false;
  std::optional<Interval> ci;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string error;  // non-empty when the row failed

  bool ok() const { return error.empty(); }
};

struct SlopeFit {
  Scheme scheme = Scheme::SisoBaseline;
  DensityMethod method = DensityMethod::SmallEps;
  std::optional<double> slope;  // unset with fewer than 4 usable points
  int points = 0;
  double reference = 0.0;       // scaling_exponent of the scheme
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<SlopeFit> slopes;
};

/// Ordinary least squares slope of log y on log x; needs at least 4 points
/// with x, y > 0.
std::optional<double> fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// One row per (scheme, grid point, method); rows sorted by scheme, then
/// antenna counts.  Failures are recorded in the row and the sweep continues.
SweepTable run_sweep(const SweepSpec& spec);

using Sampler = std::function<double(CounterRng&)>;
using Cdf = std::function<double(double)>;

struct KsReport {
  double statistic = 0.0;
  double critical_value = 0.0;
  std::uint64_t samples = 0;
  bool pass = false;
};

/// Asymptotic 1% critical value of the one-sample KS statistic.
double ks_critical_value_1pct(std::uint64_t n);

/// One-sample KS test of `samples` (sorted in place) against `cdf`.
KsReport ks_test(std::vector<double>& samples, const Cdf& cdf);

/// Draws `samples` values (sample i from stream (seed, i)) and runs ks_test.
/// Throws PreconditionError when samples < 1000.
KsReport validate_distribution(const Sampler& sampler, const Cdf& reference,
                               std::uint64_t samples, std::uint64_t seed);

struct ReferenceLaw {
  SignalLawKind kind = SignalLawKind::Gamma;
  int dof = 1;

  double cdf(double x) const;
};

/// Signal-gain sampler of the scheme built from explicit channels.
Sampler gain_sampler(Scheme scheme, const NetworkParams& params,
                     const sim::SimOptions& options = {});

/// Interference-mark sampler of the scheme.
Sampler mark_sampler(Scheme scheme, const NetworkParams& params,
                     sim::MarkModel model = sim::MarkModel::Explicit);

/// Empirical E[I^{2/alpha}] of the explicit interference marks.
double mark_moment(Scheme scheme, const NetworkParams& params, std::uint64_t samples,
                   std::uint64_t seed);

}  // namespace tcap::mc
