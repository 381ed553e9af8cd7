#include "tcap/analytic_models.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <string>

#include "tcap/errors.hpp"
#include "tcap/math_kernels.hpp"

namespace tcap::analytic {

namespace {

void require_analytic(const NetworkParams& p) {
  validate(p);
  if (!(p.beta > 0.0)) throw DomainError("beta must be > 0 for density formulas");
}

// Pure-noise exponent w = eta beta D^alpha / rho.
double noise_exponent(const NetworkParams& p) { return p.zeta() * p.eta_over_rho(); }

DensityResult finish(Scheme scheme, const NetworkParams& p, DensityMethod method,
                     double raw_lambda) {
  DensityResult r;
  r.scheme = scheme;
  r.method = method;
  const bool floor_exceeded = noise_floor(scheme, p) > p.epsilon;
  if (floor_exceeded || !(raw_lambda > 0.0)) {
    r.lambda_eps = 0.0;
    r.noise_limited = true;
  } else {
    r.lambda_eps = raw_lambda;
  }
  r.ase = area_spectral_efficiency(p, r.lambda_eps);
  return r;
}

// eps F_d e^{-w} / (I_marks b^{2/a} D^2)
double small_eps_density(const NetworkParams& p, int signal_dof, int marks) {
  const double f = kernels::f_coeff(signal_dof, p.alpha, p.eta_over_rho());
  return f * p.epsilon * std::exp(-noise_exponent(p)) /
         (kernels::interference_coeff(marks, p.alpha) * p.geometry_factor());
}

}  // namespace

double outage_upper_lemma1(const NetworkParams& p, int d) {
  validate(p);
  if (d < 1) throw DomainError("d must be >= 1");
  const double s = p.zeta() / (4.0 * d);
  const double bound = kernels::laplace_field(s, p.lambda, p.alpha, p.M) *
                       kernels::noise_laplace(s, p.eta, p.rho, kernels::NoiseSign::Printed);
  return std::min(1.0, bound);
}

OutageBracket outage_sandwich_lemma2(const NetworkParams& p, int d) {
  validate(p);
  if (d < 1) throw DomainError("d must be >= 1");
  const double c = kernels::chi2_bound_scale(d);
  const double zeta = p.zeta();
  if (!(zeta > 0.0)) return {0.0, 0.0};
  const double lower = kernels::sandwich_series(d, zeta, c, p).outage;
  const double upper = kernels::sandwich_series(d, zeta, 1.0, p).outage;
  return {lower, upper};
}

DensityResult density_dpc_mimo(const NetworkParams& p, DpcMethod method) {
  require_analytic(p);
  check_feasible(Scheme::DpcMimoUb, p);
  const int d = p.M * p.N;
  const double im = kernels::interference_coeff(p.M, p.alpha);
  const double g = p.geometry_factor();
  const double w = noise_exponent(p);
  switch (method) {
    case DpcMethod::UpperBound: {
      const double lambda = std::pow(4.0 * d, p.delta()) / (im * g) *
                            (-std::log1p(-p.epsilon) + w / (4.0 * d));
      return finish(Scheme::DpcMimoUb, p, DensityMethod::UpperBound, lambda);
    }
    case DpcMethod::SmallEps:
      return finish(Scheme::DpcMimoUb, p, DensityMethod::SmallEps, small_eps_density(p, d, p.M));
    case DpcMethod::Sandwich: {
      const double zeta = p.zeta();
      const double c = kernels::chi2_bound_scale(d);
      const double s1 = kernels::sandwich_series(d, zeta, 1.0, p).linear_coeff;
      const double sc = kernels::sandwich_series(d, zeta, c, p).linear_coeff;
      const double lower = (p.epsilon - std::pow(-std::expm1(-w), d)) / (s1 * im * g);
      const double upper = (p.epsilon - std::pow(-std::expm1(-c * w), d)) /
                           (sc * std::pow(c, p.delta()) * im * g);
      DensityResult r = finish(Scheme::DpcMimoUb, p, DensityMethod::LowerBound, lower);
      r.bracket = Interval{std::max(0.0, r.lambda_eps), std::max(0.0, upper)};
      return r;
    }
  }
  throw PreconditionError("unknown DPC method");
}

DensityResult density_dpc_miso(const NetworkParams& p) {
  require_analytic(p);
  check_feasible(Scheme::DpcMiso, p);
  return finish(Scheme::DpcMiso, p, DensityMethod::SmallEps, small_eps_density(p, p.M, p.M));
}

DensityResult density_zf(const NetworkParams& p, ZfVariant variant, ZfMisoForm miso_form) {
  require_analytic(p);
  switch (variant) {
    case ZfVariant::Multi: {
      check_feasible(Scheme::ZfMulti, p);
      const int c = p.M - p.K * p.N + 1;
      return finish(Scheme::ZfMulti, p, DensityMethod::SmallEps,
                    small_eps_density(p, c, p.K * p.N));
    }
    case ZfVariant::RxZf: {
      check_feasible(Scheme::ZfRxZf, p);
      return finish(Scheme::ZfRxZf, p, DensityMethod::SmallEps,
                    small_eps_density(p, p.N - p.M + 1, p.M));
    }
    case ZfVariant::Miso: {
      check_feasible(Scheme::ZfMiso, p);
      const double denom = kernels::interference_coeff(p.M, p.alpha) * p.geometry_factor();
      const double w = noise_exponent(p);
      if (miso_form == ZfMisoForm::SmallEps) {
        return finish(Scheme::ZfMiso, p, DensityMethod::SmallEps,
                      p.epsilon * std::exp(-w) / denom);
      }
      return finish(Scheme::ZfMiso, p, DensityMethod::ExactRoot,
                    (-std::log1p(-p.epsilon) - w) / denom);
    }
  }
  throw PreconditionError("unknown ZF variant");
}

double antsel_coefficient(const NetworkParams& p) {
  require_analytic(p);
  const double w = noise_exponent(p);
  const double weighted = kernels::sandwich_series(p.N, p.zeta(), 1.0, p).linear_coeff;
  return std::exp(w) * weighted;
}

DensityResult density_zf_antsel(const NetworkParams& p) {
  require_analytic(p);
  check_feasible(Scheme::ZfAntSel, p);
  const double w = noise_exponent(p);
  const double lambda = p.epsilon * std::exp(-w) /
                        (antsel_coefficient(p) * kernels::interference_coeff(p.M, p.alpha) *
                         p.geometry_factor());
  return finish(Scheme::ZfAntSel, p, DensityMethod::SmallEps, lambda);
}

DensityResult density_bd(const NetworkParams& p) {
  require_analytic(p);
  check_feasible(Scheme::BdUb, p);
  const int r = p.N * p.M - (p.K - 1) * p.N * p.N;
  return finish(Scheme::BdUb, p, DensityMethod::UpperBound, small_eps_density(p, r, p.K));
}

double area_spectral_efficiency(const NetworkParams& p, double lambda_eps) {
  if (!(lambda_eps >= 0.0)) throw DomainError("lambda_eps must be >= 0");
  return p.K * lambda_eps * (1.0 - p.epsilon) * std::log2(1.0 + p.beta);
}

double scaling_exponent(Scheme scheme, double alpha) {
  if (!(alpha > 2.0)) throw DomainError("alpha must be > 2");
  const double delta = 2.0 / alpha;
  switch (scheme) {
    case Scheme::DpcMimoUb: return 1.0 + delta;
    case Scheme::DpcMiso: return 1.0;
    case Scheme::ZfMiso: return 1.0 - delta;
    case Scheme::ZfAntSel: return 1.0;
    // K N streams against I_{KN}: (KN)^{1 - 2/alpha}.
    case Scheme::ZfMulti: return 1.0 - delta;
    case Scheme::ZfRxZf: return 1.0 - delta;
    case Scheme::BdUb: return 2.0 * delta;
    case Scheme::SisoBaseline: return 0.0;
  }
  throw PreconditionError("unknown scheme");
}

double noise_floor(Scheme scheme, const NetworkParams& p) {
  const double w = noise_exponent(p);
  if (w == 0.0) return 0.0;
  const SignalLaw law = signal_law(scheme, p);
  if (law.dof < 1) throw PreconditionError("signal law has no degrees of freedom");
  if (law.kind == SignalLawKind::MaxExponential) return std::pow(-std::expm1(-w), law.dof);
  return boost::math::gamma_p(static_cast<double>(law.dof), w);
}

bool has_exact_outage(Scheme scheme) {
  return scheme == Scheme::SisoBaseline || scheme == Scheme::ZfMiso ||
         scheme == Scheme::ZfAntSel;
}

double exact_outage(Scheme scheme, const NetworkParams& p) {
  validate(p);
  check_feasible(scheme, p);
  switch (scheme) {
    case Scheme::SisoBaseline:
    case Scheme::ZfMiso: {
      const double exponent =
          noise_exponent(p) +
          p.lambda * p.geometry_factor() * kernels::interference_coeff(p.M, p.alpha);
      return -std::expm1(-exponent);
    }
    case Scheme::ZfAntSel:
      if (!(p.zeta() > 0.0)) return 0.0;
      return kernels::sandwich_series(p.N, p.zeta(), 1.0, p, p.M).outage;
    default:
      throw UnsupportedError(std::string(to_string(scheme)) +
                             " has no exact Laplace-domain outage");
  }
}

DensityResult exact_density_root(Scheme scheme, const NetworkParams& params, double rel_tol) {
  if (!has_exact_outage(scheme)) {
    throw UnsupportedError(std::string(to_string(scheme)) +
                           " has no exact Laplace-domain outage");
  }
  require_analytic(params);
  check_feasible(scheme, params);
  if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be > 0");
  NetworkParams p = params;
  if (noise_floor(scheme, p) > p.epsilon) {
    return finish(scheme, p, DensityMethod::ExactRoot, 0.0);
  }
  auto outage_at = [&](double lambda) {
    p.lambda = lambda;
    return exact_outage(scheme, p);
  };
  double lo = 0.0;
  double hi = p.epsilon / (kernels::interference_coeff(p.M, p.alpha) * p.geometry_factor());
  for (int i = 0; outage_at(hi) <= p.epsilon; ++i) {
    if (i > 200) throw DomainError("exact_density_root: could not bracket the root");
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 400 && (hi - lo) > rel_tol * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (outage_at(mid) > p.epsilon) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return finish(scheme, params, DensityMethod::ExactRoot, 0.5 * (lo + hi));
}

DensityMethod default_method(Scheme scheme) {
  switch (scheme) {
    case Scheme::ZfMiso:
    case Scheme::SisoBaseline: return DensityMethod::ExactRoot;
    case Scheme::BdUb: return DensityMethod::UpperBound;
    default: return DensityMethod::SmallEps;
  }
}

DensityResult analytic_density(Scheme scheme, const NetworkParams& p, DensityMethod method) {
  auto unsupported = [&]() -> DensityResult {
    throw UnsupportedError(std::string(to_string(scheme)) + " has no analytic '" +
                           std::string(to_string(method)) + "' density");
  };
  switch (scheme) {
    case Scheme::DpcMimoUb:
      switch (method) {
        case DensityMethod::UpperBound: return density_dpc_mimo(p, DpcMethod::UpperBound);
        case DensityMethod::SmallEps: return density_dpc_mimo(p, DpcMethod::SmallEps);
        case DensityMethod::LowerBound: return density_dpc_mimo(p, DpcMethod::Sandwich);
        default: return unsupported();
      }
    case Scheme::DpcMiso:
      if (method == DensityMethod::SmallEps) return density_dpc_miso(p);
      return unsupported();
    case Scheme::ZfMulti:
      if (method == DensityMethod::SmallEps) return density_zf(p, ZfVariant::Multi);
      return unsupported();
    case Scheme::ZfRxZf:
      if (method == DensityMethod::SmallEps) return density_zf(p, ZfVariant::RxZf);
      return unsupported();
    case Scheme::ZfMiso:
      if (method == DensityMethod::ExactRoot) return density_zf(p, ZfVariant::Miso);
      if (method == DensityMethod::SmallEps) {
        return density_zf(p, ZfVariant::Miso, ZfMisoForm::SmallEps);
      }
      return unsupported();
    case Scheme::ZfAntSel:
      if (method == DensityMethod::SmallEps) return density_zf_antsel(p);
      if (method == DensityMethod::ExactRoot) return exact_density_root(scheme, p);
      return unsupported();
    case Scheme::BdUb:
      if (method == DensityMethod::UpperBound) return density_bd(p);
      return unsupported();
    case Scheme::SisoBaseline:
      if (method == DensityMethod::ExactRoot) return exact_density_root(scheme, p);
      if (method == DensityMethod::SmallEps) {
        require_analytic(p);
        check_feasible(scheme, p);
        return finish(scheme, p, DensityMethod::SmallEps, small_eps_density(p, 1, 1));
      }
      return unsupported();
  }
  return unsupported();
}

}  // namespace tcap::analytic
