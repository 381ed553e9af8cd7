#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "tcap/analytic_models.hpp"
#include "tcap/cli.hpp"
#include "tcap/errors.hpp"
#include "tcap/math_kernels.hpp"

namespace tcap::cli {

namespace {

mc::BisectionOptions bisection_options(const ExperimentConfig& c, Scheme scheme) {
  mc::BisectionOptions o;
  o.tolerance = c.tolerance;
  o.initial_trials = c.initial_trials;
  o.max_trials_per_probe = c.max_trials_per_probe;
  o.trial_budget = c.trial_budget;
  if (const auto it = c.sections.find(scheme); it != c.sections.end()) o.sim = it->second.sim;
  return o;
}

mc::SweepSpec sweep_spec(const ExperimentConfig& c) {
  mc::SweepSpec spec;
  spec.schemes = c.schemes;
  spec.grid = c.grid;
  spec.params = c.params;
  spec.mode = c.mode;
  spec.seed = c.seed;
  spec.bisection = bisection_options(c, Scheme::SisoBaseline);
  spec.bisection.sim = {};
  for (const auto& [scheme, section] : c.sections) {
    if (!section.methods.empty()) spec.methods[scheme] = section.methods;
    spec.sim[scheme] = section.sim;
  }
  return spec;
}

ResultRow to_result(const mc::SweepRow& s) {
  ResultRow r;
  r.scheme = s.scheme;
  r.params = s.params;
  r.method = std::string(to_string(s.method));
  if (s.ok()) {
    r.lambda_eps = s.lambda_eps;
    r.ase = s.ase;
  }
  r.ci = s.ci;
  r.trials = s.trials;
  if (s.method == DensityMethod::McRoot) r.seed = s.seed;
  r.noise_limited = s.noise_limited;
  r.error = s.error;
  return r;
}

void add_slopes(ResultSet& out, const mc::SweepTable& table) {
  for (const auto& s : table.slopes) {
    out.slopes.push_back(
        {s.scheme, std::string(to_string(s.method)), s.slope, s.points, s.reference});
  }
}

void add_exponents(ResultSet& out, const ExperimentConfig& c) {
  for (Scheme s : c.schemes) out.exponents[s] = analytic::scaling_exponent(s, c.params.alpha);
}

void raise(CommandOutcome& outcome, int code, const std::string& message) {
  // Inconclusive outranks numerical failure, which outranks a config error
  // discovered at run time.
  auto rank = [](int c) {
    switch (c) {
      case kExitInconclusive: return 3;
      case kExitNumerical: return 2;
      case kExitConfig: return 1;
      default: return 0;
    }
  };
  if (rank(code) > rank(outcome.exit_code)) outcome.exit_code = code;
  if (!outcome.diagnostic.empty()) outcome.diagnostic += "\n";
  outcome.diagnostic += message;
}

template <typename Writer>
int emit(const ExperimentConfig& c, std::ostream& fallback, std::ostream& diag, Writer&& write) {
  if (c.out.empty()) {
    write(fallback);
    fallback.flush();
    return kExitOk;
  }
  std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
  if (!file) {
    diag << "error: cannot open output file '" << c.out << "'\n";
    return kExitConfig;
  }
  write(file);
  return kExitOk;
}

template <typename Body>
int guarded(std::ostream& diag, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    diag << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PreconditionError& e) {
    diag << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InconclusiveError& e) {
    diag << "inconclusive: " << e.what() << " bracket [" << format_double(e.bracket_low())
         << ", " << format_double(e.bracket_high()) << "]\n";
    return kExitInconclusive;
  } catch (const std::exception& e) {
    diag << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

void write_results(std::ostream& os, const ExperimentConfig& c, const ResultSet& r) {
  if (c.format == OutputFormat::Json) {
    write_json(os, r);
  } else {
    write_csv(os, r);
  }
}

CheckResult ks_check(const std::string& name, const mc::Sampler& sampler,
                     const mc::ReferenceLaw& law, std::uint64_t samples, std::uint64_t seed) {
  const mc::KsReport ks = mc::validate_distribution(
      sampler, [law](double x) { return law.cdf(x); }, samples, seed);
  CheckResult c;
  c.name = name;
  c.pass = ks.pass;
  c.residual = ks.statistic;
  c.tolerance = ks.critical_value;
  c.detail = "ks statistic vs 1% critical value; n=" + std::to_string(ks.samples);
  return c;
}

}  // namespace

ResultSet run_analytic(const ExperimentConfig& c) {
  ExperimentConfig single = c;
  single.grid = {{c.params.M, c.params.N, c.params.K}};
  single.mode = mc::SweepMode::Analytic;
  const mc::SweepTable table = mc::run_sweep(sweep_spec(single));
  ResultSet out;
  out.command = "analytic";
  for (const auto& row : table.rows) out.rows.push_back(to_result(row));
  add_exponents(out, c);
  return out;
}

ResultSet run_simulate(const ExperimentConfig& c, CommandOutcome& outcome) {
  ResultSet out;
  out.command = "simulate";
  for (Scheme scheme : c.schemes) {
    NetworkParams p = adapt_to_scheme(scheme, c.params);
    ResultRow row;
    row.scheme = scheme;
    row.seed = c.seed;
    const mc::BisectionOptions opts = bisection_options(c, scheme);
    try {
      check_feasible(scheme, p);
      if (c.lambda) {
        p.lambda = *c.lambda;
        row.params = p;
        row.method = "mc-outage";
        const mc::OutageEstimate e = mc::estimate_outage(scheme, p, c.trials, c.seed, opts.sim);
        row.lambda_eps = p.lambda;
        row.outage = e.p_hat;
        row.ase = p.K * p.lambda * (1.0 - e.p_hat) * std::log2(1.0 + p.beta);
        row.ci = Interval{e.ci_low, e.ci_high};
        row.trials = e.trials;
      } else {
        row.params = p;
        row.method = std::string(to_string(DensityMethod::McRoot));
        const DensityResult r = mc::find_max_density(scheme, p, c.seed, opts);
        row.lambda_eps = r.lambda_eps;
        row.ase = r.ase;
        row.ci = r.bracket;
        row.trials = r.trials;
        row.noise_limited = r.noise_limited;
      }
    } catch (const InconclusiveError& e) {
      row.params = p;
      row.error = e.what();
      row.ci = Interval{e.bracket_low(), e.bracket_high()};
      raise(outcome, kExitInconclusive,
            std::string(to_string(scheme)) + ": inconclusive, bracket [" +
                format_double(e.bracket_low()) + ", " + format_double(e.bracket_high()) + "]");
    } catch (const PreconditionError& e) {
      row.params = p;
      row.error = e.what();
      raise(outcome, kExitConfig, e.what());
    } catch (const std::exception& e) {
      row.params = p;
      row.error = e.what();
      raise(outcome, kExitNumerical, std::string(to_string(scheme)) + ": " + e.what());
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

ResultSet run_sweep(const ExperimentConfig& c, CommandOutcome& outcome) {
  const mc::SweepTable table = mc::run_sweep(sweep_spec(c));
  ResultSet out;
  out.command = "sweep";
  bool any_ok = false;
  for (const auto& row : table.rows) {
    out.rows.push_back(to_result(row));
    if (row.ok()) {
      any_ok = true;
    } else {
      outcome.diagnostic += std::string(to_string(row.scheme)) + " " +
                            std::to_string(row.params.M) + "x" + std::to_string(row.params.N) +
                            "x" + std::to_string(row.params.K) + ": " + row.error + "\n";
    }
  }
  add_slopes(out, table);
  add_exponents(out, c);
  if (!any_ok) outcome.exit_code = kExitNumerical;
  return out;
}

ValidationReport run_validation(const ExperimentConfig& c, const ValidationFixture& fixture) {
  ValidationReport report;
  const double alpha = c.params.alpha;
  const double ref_alpha = fixture.reference_alpha.value_or(alpha);
  const std::uint64_t samples = std::max<std::uint64_t>(c.trials, 1000);
  using boost::math::lgamma;
  using boost::math::tgamma;

  {
    CheckResult check{"interference-coeff-identity", false, 0.0, 1e-10, ""};
    for (double a : {2.5, 3.0, 4.0, 6.0, alpha}) {
      const double ra = a == alpha ? ref_alpha : a;
      const double rd = 2.0 / ra;
      for (int m = 1; m <= 64; ++m) {
        const double expected = std::numbers::pi * tgamma(1.0 - rd) *
                                std::exp(lgamma(m + rd) - lgamma(static_cast<double>(m)));
        const double got = kernels::interference_coeff(m, a);
        check.residual = std::max(check.residual, std::abs(got / expected - 1.0));
      }
    }
    check.pass = check.residual <= check.tolerance;
    check.detail = "max relative error over M<=64";
    report.checks.push_back(check);
  }
  {
    CheckResult check{"f-coeff-identity", false, 0.0, 1e-9, ""};
    for (double a : {2.5, 3.0, 4.0, 6.0, alpha}) {
      const double ra = a == alpha ? ref_alpha : a;
      const double rd = 2.0 / ra;
      for (int d = 1; d <= 32; ++d) {
        const double expected =
            tgamma(1.0 - rd) * std::exp(lgamma(static_cast<double>(d)) - lgamma(d - rd));
        const double got = kernels::f_coeff(d, a, 0.0);
        check.residual = std::max(check.residual, std::abs(got / expected - 1.0));
      }
    }
    check.pass = check.residual <= check.tolerance;
    check.detail = "max relative error over d<=32 at zero noise";
    report.checks.push_back(check);
  }
  {
    // I_M = pi Gamma(1-delta) E[G^delta], G ~ Gamma(M).
    const int m = std::max(1, c.params.M);
    const double delta = 2.0 / alpha;
    const GammaSampler gamma(m);
    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
      CounterRng rng(mix_seed(c.seed, 101), i);
      const double v = std::pow(gamma(rng), delta);
      sum += v;
      sum2 += v * v;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
    const double mc_coeff = std::numbers::pi * tgamma(1.0 - delta) * mean;
    const double ref = kernels::interference_coeff(m, ref_alpha);
    const double ref_se = std::numbers::pi * tgamma(1.0 - delta) * se;
    CheckResult check{"gamma-moment-identity", false, std::abs(mc_coeff - ref) / ref_se, 4.0,
                      "z-score of Monte Carlo pi Gamma(1-delta) E[G^delta] vs I_M; M=" +
                          std::to_string(m)};
    check.pass = check.residual <= check.tolerance;
    report.checks.push_back(check);
  }

  struct KsCase {
    std::string name;
    Scheme scheme;
    int M, N, K;
    mc::ReferenceLaw law;
  };
  const std::vector<KsCase> cases = {
      {"ks-zf-gain-M4-K2-N1", Scheme::ZfMulti, 4, 1, 2, {SignalLawKind::Gamma, 3}},
      {"ks-zf-gain-M6-K2-N2", Scheme::ZfMulti, 6, 2, 2, {SignalLawKind::Gamma, 3}},
      {"ks-zf-gain-M8-K4-N1", Scheme::ZfMulti, 8, 1, 4, {SignalLawKind::Gamma, 5}},
      {"ks-bd-frobenius-M8-K2-N2", Scheme::BdUb, 8, 2, 2, {SignalLawKind::Gamma, 12}},
      {"ks-antsel-N2", Scheme::ZfAntSel, 4, 2, 4, {SignalLawKind::MaxExponential, 2}},
      {"ks-antsel-N4", Scheme::ZfAntSel, 4, 4, 4, {SignalLawKind::MaxExponential, 4}},
  };
  std::uint64_t salt = 200;
  for (const auto& kc : cases) {
    NetworkParams p = c.params;
    p.M = kc.M;
    p.N = kc.N;
    p.K = kc.K;
    report.checks.push_back(ks_check(kc.name, mc::gain_sampler(kc.scheme, p), kc.law, samples,
                                     mix_seed(c.seed, salt++)));
  }
  {
    NetworkParams p = c.params;
    p.M = p.K = 4;
    p.N = 1;
    report.checks.push_back(ks_check("ks-dpc-mark-M4",
                                     mc::mark_sampler(Scheme::DpcMiso, p),
                                     {SignalLawKind::Gamma, 4}, samples,
                                     mix_seed(c.seed, salt++)));
  }
  {
    NetworkParams p = adapt_to_scheme(Scheme::SisoBaseline, c.params);
    p.lambda = c.lambda.value_or(1e-4);
    if (!(p.beta > 0.0)) p.beta = 3.0;
    const mc::OutageEstimate e =
        mc::estimate_outage(Scheme::SisoBaseline, p, samples, mix_seed(c.seed, salt++));
    const double rd = 2.0 / ref_alpha;
    const double exact_success =
        std::exp(-p.lambda * std::pow(p.beta, rd) * p.distance * p.distance *
                     kernels::interference_coeff(1, ref_alpha) -
                 p.eta * p.beta * std::pow(p.distance, ref_alpha) / p.rho);
    const double exact = 1.0 - exact_success;
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(e.trials));
    CheckResult check{"siso-outage-oracle", false,
                      se > 0.0 ? std::abs(e.p_hat - exact) / se : std::abs(e.p_hat - exact), 3.0,
                      "standard errors between Monte Carlo and exact SISO outage; lambda=" +
                          format_double(p.lambda)};
    check.pass = check.residual <= check.tolerance;
    report.checks.push_back(check);
  }
  return report;
}

int cmd_analytic(const ExperimentConfig& config, std::ostream& fallback, std::ostream& diag) {
  return guarded(diag, [&]() -> int {
    validate_config(config);
    const ResultSet r = run_analytic(config);
    int code = emit(config, fallback, diag, [&](std::ostream& os) { write_results(os, config, r); });
    for (const auto& row : r.rows) {
      if (!row.error.empty()) {
        diag << to_string(row.scheme) << " " << row.method << ": " << row.error << "\n";
        if (code == kExitOk) code = kExitNumerical;
      }
    }
    return code;
  });
}

int cmd_simulate(const ExperimentConfig& config, std::ostream& fallback, std::ostream& diag) {
  return guarded(diag, [&]() -> int {
    validate_config(config);
    CommandOutcome outcome;
    const ResultSet r = run_simulate(config, outcome);
    const int code =
        emit(config, fallback, diag, [&](std::ostream& os) { write_results(os, config, r); });
    if (!outcome.diagnostic.empty()) diag << outcome.diagnostic << "\n";
    return code != kExitOk ? code : outcome.exit_code;
  });
}

int cmd_sweep(const ExperimentConfig& config, std::ostream& fallback, std::ostream& diag) {
  return guarded(diag, [&]() -> int {
    validate_config(config);
    if (config.grid.size() < 2) throw ConfigError("grid", "sweep needs at least 2 grid points");
    CommandOutcome outcome;
    const ResultSet r = run_sweep(config, outcome);
    const int code =
        emit(config, fallback, diag, [&](std::ostream& os) { write_results(os, config, r); });
    diag << outcome.diagnostic;
    for (const auto& s : r.slopes) {
      diag << "slope " << to_string(s.scheme) << " " << s.method << ": "
           << (s.slope ? format_double(*s.slope) : "undefined") << " (reference "
           << format_double(s.reference) << ", points " << s.points << ")\n";
    }
    return code != kExitOk ? code : outcome.exit_code;
  });
}

int cmd_validate(const ExperimentConfig& config, std::ostream& fallback, std::ostream& diag) {
  return guarded(diag, [&]() -> int {
    validate_config(config);
    const ValidationReport report = run_validation(config);
    const int code = emit(config, fallback, diag, [&](std::ostream& os) {
      if (config.format == OutputFormat::Json) {
        write_report_json(os, report);
      } else {
        write_report_csv(os, report);
      }
    });
    for (const auto& c : report.checks) {
      if (!c.pass) diag << "FAILED " << c.name << ": residual " << format_double(c.residual)
                        << " > " << format_double(c.tolerance) << "\n";
    }
    if (code != kExitOk) return code;
    return report.pass() ? kExitOk : kExitNumerical;
  });
}

}  // namespace tcap::cli
