#include "tcap/math_kernels.hpp"

#include <mpfr.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "tcap/errors.hpp"

namespace tcap::kernels {

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_alpha(double alpha) {
  if (!(alpha > 2.0) || !std::isfinite(alpha)) {
    throw DomainError("alpha must be > 2 for a finite shot-noise functional");
  }
}

void require_order(int d, const char* name) {
  if (d < 1) throw DomainError(std::string(name) + " must be >= 1");
}

double binomial(int n, int k) {
  return std::round(std::exp(log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0)));
}

// RAII handle for an MPFR variable.
class MpFloat {
 public:
  explicit MpFloat(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~MpFloat() { mpfr_clear(v_); }
  MpFloat(const MpFloat&) = delete;
  MpFloat& operator=(const MpFloat&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

// sum_{k=1}^{d} C(d,k) (-1)^k expm1(-(a1 k + a2 k^delta)), evaluated with
// enough bits to absorb the 2^d cancellation.  Inputs are taken as exact.
double alternating_outage_mp(int d, double a1, double a2, double delta) {
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(d) + 128;
  MpFloat sum(prec), binom(prec), term(prec), kpow(prec), x(prec), k_mp(prec), del(prec),
      c1(prec), c2(prec);
  mpfr_set_zero(sum.get(), 1);
  mpfr_set_ui(binom.get(), 1, MPFR_RNDN);
  mpfr_set_d(del.get(), delta, MPFR_RNDN);
  mpfr_set_d(c1.get(), a1, MPFR_RNDN);
  mpfr_set_d(c2.get(), a2, MPFR_RNDN);
  for (int k = 1; k <= d; ++k) {
    mpfr_mul_ui(binom.get(), binom.get(), static_cast<unsigned long>(d - k + 1), MPFR_RNDN);
    mpfr_div_ui(binom.get(), binom.get(), static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_set_ui(k_mp.get(), static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_pow(kpow.get(), k_mp.get(), del.get(), MPFR_RNDN);
    mpfr_mul_ui(x.get(), c1.get(), static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_fma(x.get(), c2.get(), kpow.get(), x.get(), MPFR_RNDN);
    mpfr_neg(x.get(), x.get(), MPFR_RNDN);
    mpfr_expm1(term.get(), x.get(), MPFR_RNDN);
    mpfr_mul(term.get(), term.get(), binom.get(), MPFR_RNDN);
    if (k % 2 == 1) {
      mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    } else {
      mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    }
  }
  return mpfr_get_d(sum.get(), MPFR_RNDN);
}

// sum_{n=1}^{d} C(d,n) (-1)^{n+1} n^delta e^{-n w} by direct summation.
double weighted_order_series_direct(int d, double delta, double w) {
  CompensatedSum acc;
  for (int n = 1; n <= d; ++n) {
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;
    acc.add(sign * binomial(d, n) * std::pow(static_cast<double>(n), delta) * std::exp(-n * w));
  }
  return acc.value();
}

// Same quantity through n^delta = delta/Gamma(1-delta) int_0^inf (1-e^{-nt}) t^{-delta-1} dt,
// which turns the alternating sum into
//   delta/Gamma(1-delta) int_0^inf [(1-e^{-(w+t)})^d - (1-e^{-w})^d] t^{-delta-1} dt.
double weighted_order_series_integral(int d, double delta, double w) {
  const double p = -std::expm1(-w);
  const double pd = std::pow(p, d);
  const double ew = std::exp(-w);
  // g(t)/t with g(t) = (1-e^{-(w+t)})^d - p^d, stable for t -> 0.
  auto g_over_t = [&](double t) -> double {
    const double grow = -std::expm1(-t) * ew;  // q - p
    if (p > 0.0) {
      return pd * std::expm1(d * std::log1p(grow / p)) / t;
    }
    return std::pow(grow, d) / t;
  };
  auto integrand = [&](double t) -> double {
    if (t <= 0.0) return 0.0;
    return g_over_t(t) * std::pow(t, -delta);
  };
  const double split = 1.0;
  const double tail_start = 40.0 + std::log(static_cast<double>(d)) + w;
  boost::math::quadrature::tanh_sinh<double> ts;
  const double head = ts.integrate(integrand, 0.0, split);
  const double body = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, split, tail_start, 20, 1e-14);
  // Past tail_start the bracket equals 1 - p^d to within e^{-40}.
  const double tail = (1.0 - pd) * std::pow(tail_start, -delta) / delta;
  return delta / std::tgamma(1.0 - delta) * (head + body + tail);
}

double weighted_order_series(int d, double delta, double w) {
  if (d <= kAlternatingSeriesLimit) return weighted_order_series_direct(d, delta, w);
  return weighted_order_series_integral(d, delta, w);
}

}  // namespace

double log_gamma(double x) { return boost::math::lgamma(x); }

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("beta_fn requires positive arguments");
  }
  return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

double interference_coeff(int M, double alpha) {
  require_alpha(alpha);
  require_order(M, "M");
  const double delta = 2.0 / alpha;
  const double log_fact_m = log_gamma(M + 1.0);
  CompensatedSum acc;
  for (int m = 0; m < M; ++m) {
    const double a = m + delta;
    const double b = M - a;
    const double log_binom = log_fact_m - log_gamma(m + 1.0) - log_gamma(M - m + 1.0);
    acc.add(std::exp(log_binom + log_gamma(a) + log_gamma(b) - log_gamma(a + b)));
  }
  return 2.0 * std::numbers::pi / alpha * acc.value();
}

double laplace_field(double s, double lambda, double alpha, int M) {
  if (!(s >= 0.0)) throw DomainError("laplace_field requires s >= 0");
  if (!(lambda >= 0.0)) throw DomainError("laplace_field requires lambda >= 0");
  const double coeff = interference_coeff(M, alpha);
  if (s == 0.0 || lambda == 0.0) return 1.0;
  return std::exp(-lambda * std::pow(s, 2.0 / alpha) * coeff);
}

double noise_laplace(double s, double eta, double rho, NoiseSign sign) {
  if (!(rho > 0.0)) throw DomainError("noise_laplace requires rho > 0");
  if (!(s >= 0.0) || !(eta >= 0.0)) throw DomainError("noise_laplace requires s, eta >= 0");
  const double exponent = s * eta / rho;
  return sign == NoiseSign::Attenuating ? std::exp(-exponent) : std::exp(exponent);
}

double f_coeff(int d, double alpha, double eta_over_rho) {
  require_alpha(alpha);
  require_order(d, "d");
  if (!(eta_over_rho >= 0.0)) throw DomainError("eta/rho must be >= 0");
  const double delta = 2.0 / alpha;

  // t_j = prod_{m<j} (m - delta) / j!; t_0 = 1 and t_j < 0 for j >= 1.
  std::vector<double> log_abs_t(static_cast<std::size_t>(d));
  log_abs_t[0] = 0.0;
  for (int j = 1; j < d; ++j) {
    log_abs_t[j] = log_abs_t[j - 1] + std::log(std::abs(j - 1 - delta)) - std::log(j);
  }
  auto t_sign = [](int j) { return j == 0 ? 1.0 : -1.0; };

  CompensatedSum total;
  if (eta_over_rho == 0.0) {
    for (int k = 0; k < d; ++k) total.add(t_sign(k) * std::exp(log_abs_t[k]));
  } else {
    const double log_r = std::log(eta_over_rho);
    std::vector<double> log_fact(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) log_fact[k] = log_gamma(k + 1.0);
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j <= k; ++j) {
        const double log_term =
            log_fact[k] - log_fact[j] - log_fact[k - j] + (k - j) * log_r + log_abs_t[j];
        total.add(t_sign(j) * std::exp(log_term));
      }
    }
  }
  const double inverse = total.value();
  if (!(inverse > 0.0)) throw DomainError("f_coeff: inner sum is not positive");
  return 1.0 / inverse;
}

double chi2_bound_scale(int d) {
  require_order(d, "d");
  return std::exp(-log_gamma(d + 1.0) / d);
}

Chi2Cdf chi2_cdf_and_bounds(int d, double x) {
  require_order(d, "d");
  if (!(x >= 0.0)) throw DomainError("chi2_cdf_and_bounds requires x >= 0");
  const double upper = std::pow(-std::expm1(-x), d);
  if (d == 1) return {upper, upper, upper};
  const double c = chi2_bound_scale(d);
  const double lower = std::pow(-std::expm1(-c * x), d);
  const double exact = boost::math::gamma_p(static_cast<double>(d), x);
  return {exact, lower, upper};
}

double order_stat_coeff(int N, double alpha) {
  require_alpha(alpha);
  require_order(N, "N");
  return weighted_order_series(N, 2.0 / alpha, 0.0);
}

SandwichTerms sandwich_series(int d, double zeta, double vartheta, const NetworkParams& params,
                              int mark_shape) {
  require_order(d, "d");
  require_alpha(params.alpha);
  if (!(zeta > 0.0)) throw DomainError("sandwich_series requires zeta > 0");
  if (!(vartheta > 0.0)) throw DomainError("sandwich_series requires vartheta > 0");
  if (!(params.rho > 0.0) || !(params.eta >= 0.0) || !(params.lambda >= 0.0)) {
    throw DomainError("sandwich_series requires rho > 0, eta >= 0, lambda >= 0");
  }
  const int shape = mark_shape > 0 ? mark_shape : params.M;
  const double delta = params.delta();
  const double arg = vartheta * zeta;
  const double noise_rate = arg * params.eta_over_rho();
  const double field_rate =
      params.lambda * std::pow(arg, delta) * interference_coeff(shape, params.alpha);

  // 1 - E[...] terms cancel exactly because sum_k C(d,k)(-1)^k = 0.
  double outage = 0.0;
  if (d <= kAlternatingSeriesLimit) {
    CompensatedSum acc;
    for (int k = 1; k <= d; ++k) {
      const double sign = (k % 2 == 1) ? -1.0 : 1.0;
      const double x = k * noise_rate + std::pow(static_cast<double>(k), delta) * field_rate;
      acc.add(sign * binomial(d, k) * std::expm1(-x));
    }
    outage = acc.value();
  } else {
    outage = alternating_outage_mp(d, noise_rate, field_rate, delta);
  }
  const double linear = weighted_order_series(d, delta, noise_rate);
  return {outage, linear};
}

}  // namespace tcap::kernels
