#include "tcap/mc_engine.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <tuple>

#include "tcap/analytic_models.hpp"
#include "tcap/errors.hpp"

namespace tcap::mc {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::uint64_t count_outages(const sim::LinkSimulator& link, std::uint64_t seed,
                            std::uint64_t begin, std::uint64_t end) {
  std::uint64_t outages = 0;
  for (std::uint64_t i = begin; i < end; ++i) {
    CounterRng rng(seed, i);
    if (!link.success(rng)) ++outages;
  }
  return outages;
}

// Classifies lambda by Monte Carlo with trial doubling; tracks the total
// trial count against the budget.
class McProbe {
 public:
  McProbe(Scheme scheme, const NetworkParams& params, std::uint64_t seed,
          const BisectionOptions& options)
      : scheme_(scheme), params_(params), seed_(seed), options_(options) {}

  ProbeVerdict operator()(double lambda) {
    NetworkParams p = params_;
    p.lambda = lambda;
    OutageRun run(scheme_, p, seed_, options_.sim, options_.workers);
    std::uint64_t n = std::max<std::uint64_t>(1, options_.initial_trials);
    while (true) {
      const std::uint64_t extra = n - run.trials();
      if (used_ + extra > options_.trial_budget) {
        throw InconclusiveError("Monte Carlo trial budget exhausted before the bracket closed",
                                0.0, std::numeric_limits<double>::infinity());
      }
      run.extend_to(n);
      used_ += extra;
      const OutageEstimate est = run.estimate();
      if (est.ci_high < params_.epsilon) return ProbeVerdict::Feasible;
      if (est.ci_low > params_.epsilon) return ProbeVerdict::Infeasible;
      if (n >= options_.max_trials_per_probe) return ProbeVerdict::Straddle;
      n = std::min(2 * n, options_.max_trials_per_probe);
    }
  }

  std::uint64_t used() const { return used_; }

 private:
  Scheme scheme_;
  NetworkParams params_;
  std::uint64_t seed_;
  BisectionOptions options_;
  std::uint64_t used_ = 0;
};

// Scale of a single-antenna density, eps / (pi beta^{2/alpha} D^2).
double initial_guess(const NetworkParams& params) {
  return params.epsilon / (std::numbers::pi * params.geometry_factor());
}

int method_rank(DensityMethod m) { return static_cast<int>(m); }

}  // namespace

double OutageEstimate::standard_error() const {
  if (trials == 0) return 0.0;
  return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

Interval wilson_interval(std::uint64_t outages, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(outages) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::clamp(centre - half, 0.0, p), std::clamp(centre + half, p, 1.0)};
}

int default_workers() {
  if (const char* env = std::getenv("TCAP_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

OutageRun::OutageRun(Scheme scheme, const NetworkParams& params, std::uint64_t seed,
                     const sim::SimOptions& options, int workers)
    : link_(scheme, params, options),
      scheme_(scheme),
      params_(params),
      seed_(seed),
      workers_(workers > 0 ? workers : default_workers()) {}

void OutageRun::extend_to(std::uint64_t trials) {
  if (trials <= trials_) return;
  const std::uint64_t begin = trials_;
  const std::uint64_t total = trials - begin;
  const auto workers = static_cast<std::uint64_t>(std::min<std::uint64_t>(workers_, total));
  if (workers <= 1) {
    outages_ += count_outages(link_, seed_, begin, trials);
  } else {
    std::vector<std::uint64_t> counts(workers, 0);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t lo = begin + total * w / workers;
      const std::uint64_t hi = begin + total * (w + 1) / workers;
      threads.emplace_back([&, w, lo, hi] { counts[w] = count_outages(link_, seed_, lo, hi); });
    }
    for (auto& t : threads) t.join();
    for (auto c : counts) outages_ += c;
  }
  trials_ = trials;
}

OutageEstimate OutageRun::estimate() const {
  OutageEstimate e;
  e.scheme = scheme_;
  e.params = params_;
  e.trials = trials_;
  e.outages = outages_;
  e.seed = seed_;
  e.p_hat = trials_ == 0 ? 0.0 : static_cast<double>(outages_) / static_cast<double>(trials_);
  const Interval ci = wilson_interval(outages_, trials_);
  e.ci_low = ci.low;
  e.ci_high = ci.high;
  return e;
}

OutageEstimate estimate_outage(Scheme scheme, const NetworkParams& params, std::uint64_t trials,
                               std::uint64_t seed, const sim::SimOptions& options, int workers) {
  if (trials < 1) throw PreconditionError("estimate_outage requires trials >= 1");
  OutageRun run(scheme, params, seed, options, workers);
  run.extend_to(trials);
  return run.estimate();
}

DensityResult bisect_density(const DensityProbe& probe, double guess, double tolerance) {
  if (!(guess > 0.0) || !std::isfinite(guess)) throw DomainError("guess must be > 0");
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be > 0");
  double low = 0.0;
  double high = std::numeric_limits<double>::infinity();
  DensityResult out;
  out.method = DensityMethod::McRoot;
  auto settle = [&](double lambda) {
    out.lambda_eps = lambda;
    out.bracket = Interval{low, high};
    return out;
  };
  auto classify = [&](double lambda) {
    try {
      return probe(lambda);
    } catch (const InconclusiveError& e) {
      throw InconclusiveError(e.what(), low, high);
    }
  };

  double lambda = guess;
  while (!std::isfinite(high)) {
    const ProbeVerdict v = classify(lambda);
    if (v == ProbeVerdict::Straddle) return settle(lambda);
    if (v == ProbeVerdict::Infeasible) {
      high = lambda;
    } else {
      low = lambda;
      lambda *= 2.0;
      if (!std::isfinite(lambda)) throw InconclusiveError("outage never exceeded epsilon", low, high);
    }
  }
  while (low == 0.0) {
    lambda *= 0.5;
    if (lambda < std::numeric_limits<double>::min()) {
      throw InconclusiveError("no feasible density found", low, high);
    }
    const ProbeVerdict v = classify(lambda);
    if (v == ProbeVerdict::Straddle) return settle(lambda);
    if (v == ProbeVerdict::Feasible) {
      low = lambda;
    } else {
      high = lambda;
    }
  }
  while (high - low > tolerance * 0.5 * (high + low)) {
    const double mid = 0.5 * (low + high);
    const ProbeVerdict v = classify(mid);
    if (v == ProbeVerdict::Straddle) return settle(mid);
    if (v == ProbeVerdict::Feasible) {
      low = mid;
    } else {
      high = mid;
    }
  }
  return settle(0.5 * (low + high));
}

DensityResult find_max_density(Scheme scheme, const NetworkParams& params, std::uint64_t seed,
                               const BisectionOptions& options) {
  validate(params);
  check_feasible(scheme, params);
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0)) {
    throw DomainError("epsilon must lie in (0, 1)");
  }
  if (!(options.tolerance > 0.0)) throw DomainError("tolerance must be > 0");
  double guess = options.initial_guess.value_or(0.0);
  if (!(guess > 0.0)) guess = initial_guess(params);

  McProbe probe(scheme, params, seed, options);
  DensityResult out;
  const ProbeVerdict floor = probe(0.0);
  if (floor != ProbeVerdict::Feasible) {
    out.method = DensityMethod::McRoot;
    out.lambda_eps = 0.0;
    out.noise_limited = floor == ProbeVerdict::Infeasible;
    out.bracket = Interval{0.0, 0.0};
  } else {
    out = bisect_density(std::ref(probe), guess, options.tolerance);
  }
  out.scheme = scheme;
  out.seed = seed;
  out.ase = analytic::area_spectral_efficiency(params, out.lambda_eps);
  out.trials = probe.used();
  return out;
}

std::optional<double> fit_loglog_slope(const std::vector<double>& x,
                                       const std::vector<double>& y) {
  if (x.size() != y.size()) throw PreconditionError("slope fit needs equal-length inputs");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) pts.emplace_back(std::log(x[i]), std::log(y[i]));
  }
  if (pts.size() < 4) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (const auto& [a, b] : pts) {
    mx += a;
    my += b;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [a, b] : pts) {
    sxx += (a - mx) * (a - mx);
    sxy += (a - mx) * (b - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

SweepTable run_sweep(const SweepSpec& spec) {
  if (spec.grid.empty()) throw PreconditionError("sweep grid is empty");
  if (spec.schemes.empty()) throw PreconditionError("sweep scheme list is empty");
  SweepTable table;

  for (Scheme scheme : spec.schemes) {
    std::vector<DensityMethod> methods;
    if (spec.mode != SweepMode::Mc) {
      const auto it = spec.methods.find(scheme);
      if (it != spec.methods.end() && !it->second.empty()) {
        methods = it->second;
      } else {
        methods.push_back(analytic::default_method(scheme));
      }
    }
    if (spec.mode != SweepMode::Analytic) methods.push_back(DensityMethod::McRoot);

    for (const AntennaConfig& cfg : spec.grid) {
      NetworkParams p = spec.params;
      p.M = cfg.M;
      p.N = cfg.N;
      p.K = cfg.K;
      p = adapt_to_scheme(scheme, p);
      for (DensityMethod method : methods) {
        SweepRow row;
        row.scheme = scheme;
        row.params = p;
        row.method = method;
        try {
          check_feasible(scheme, p);
          DensityResult r;
          if (method == DensityMethod::McRoot) {
            BisectionOptions opts = spec.bisection;
            if (const auto s = spec.sim.find(scheme); s != spec.sim.end()) opts.sim = s->second;
            r = find_max_density(scheme, p, spec.seed, opts);
            row.seed = spec.seed;
          } else {
            r = analytic::analytic_density(scheme, p, method);
          }
          row.method = r.method;
          row.lambda_eps = r.lambda_eps;
          row.ase = analytic::area_spectral_efficiency(p, r.lambda_eps);
          row.noise_limited = r.noise_limited;
          row.ci = r.bracket;
          row.trials = r.trials;
        } catch (const InconclusiveError& e) {
          row.error = e.what();
          row.ci = Interval{e.bracket_low(), e.bracket_high()};
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        table.rows.push_back(std::move(row));
      }
    }
  }

  std::stable_sort(table.rows.begin(), table.rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::make_tuple(static_cast<int>(a.scheme), a.params.M, a.params.N, a.params.K,
                           method_rank(a.method)) <
           std::make_tuple(static_cast<int>(b.scheme), b.params.M, b.params.N, b.params.K,
                           method_rank(b.method));
  });

  for (Scheme scheme : spec.schemes) {
    std::map<DensityMethod, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& row : table.rows) {
      if (row.scheme != scheme) continue;
      auto& g = groups[row.method];
      if (row.ok()) {
        g.first.push_back(row.params.M);
        g.second.push_back(row.ase);
      }
    }
    for (const auto& [method, xy] : groups) {
      SlopeFit fit;
      fit.scheme = scheme;
      fit.method = method;
      fit.points = static_cast<int>(xy.first.size());
      fit.slope = fit_loglog_slope(xy.first, xy.second);
      fit.reference = analytic::scaling_exponent(scheme, spec.params.alpha);
      table.slopes.push_back(fit);
    }
  }
  return table;
}

double ks_critical_value_1pct(std::uint64_t n) {
  const double s = std::sqrt(static_cast<double>(n));
  return 1.6276 / (s + 0.12 + 0.11 / s);
}

KsReport ks_test(std::vector<double>& samples, const Cdf& cdf) {
  if (samples.empty()) throw PreconditionError("ks_test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  KsReport report;
  report.statistic = d;
  report.samples = samples.size();
  report.critical_value = ks_critical_value_1pct(samples.size());
  report.pass = d < report.critical_value;
  return report;
}

KsReport validate_distribution(const Sampler& sampler, const Cdf& reference,
                               std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1000) throw PreconditionError("validate_distribution needs at least 1000 samples");
  std::vector<double> draws(samples);
  for (std::uint64_t i = 0; i < samples; ++i) {
    CounterRng rng(seed, i);
    draws[i] = sampler(rng);
  }
  return ks_test(draws, reference);
}

double ReferenceLaw::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (kind == SignalLawKind::MaxExponential) return std::pow(-std::expm1(-x), dof);
  return boost::math::gamma_p(static_cast<double>(dof), x);
}

Sampler gain_sampler(Scheme scheme, const NetworkParams& params,
                     const sim::SimOptions& options) {
  check_feasible(scheme, params);
  return [scheme, params, options](CounterRng& rng) {
    while (true) {
      const sim::ChannelSet channels = sim::sample_scheme_channels(scheme, params, rng);
      try {
        return sim::signal_gain(scheme, params, channels, options, rng);
      } catch (const RankDeficientError&) {
      }
    }
  };
}

Sampler mark_sampler(Scheme scheme, const NetworkParams& params, sim::MarkModel model) {
  check_feasible(scheme, params);
  sim::SimOptions options;
  options.marks = model;
  return [scheme, params, options](CounterRng& rng) {
    return sim::interference_mark(scheme, params, options, rng);
  };
}

double mark_moment(Scheme scheme, const NetworkParams& params, std::uint64_t samples,
                   std::uint64_t seed) {
  if (samples < 1) throw PreconditionError("mark_moment needs samples >= 1");
  const Sampler draw = mark_sampler(scheme, params, sim::MarkModel::Explicit);
  const double delta = params.delta();
  double sum = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    CounterRng rng(seed, i);
    sum += std::pow(draw(rng), delta);
  }
  return sum / static_cast<double>(samples);
}

}  // namespace tcap::mc
