#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tcap/errors.hpp"
#include "tcap/math_kernels.hpp"

using namespace tcap;
using namespace tcap::kernels;

namespace {

constexpr double kPi = std::numbers::pi;

double closed_form_im(int m, double alpha) {
  const double d = 2.0 / alpha;
  return kPi * std::tgamma(1.0 - d) * std::exp(std::lgamma(m + d) - std::lgamma(m));
}

double closed_form_f(int d, double alpha) {
  const double delta = 2.0 / alpha;
  return std::tgamma(1.0 - delta) * std::exp(std::lgamma(d) - std::lgamma(d - delta));
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

// F_d from its defining double sum, evaluated naively in long double.
double naive_f(int d, double alpha, double r) {
  const long double delta = 2.0L / alpha;
  long double total = 0.0L;
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j <= k; ++j) {
      long double t = 1.0L;
      for (int m = 0; m < j; ++m) t *= (m - delta);
      t /= std::tgamma(static_cast<long double>(j + 1));
      const long double binom = std::tgamma(static_cast<long double>(k + 1)) /
                                (std::tgamma(static_cast<long double>(j + 1)) *
                                 std::tgamma(static_cast<long double>(k - j + 1)));
      total += binom * std::pow(static_cast<long double>(r), k - j) * t;
    }
  }
  return static_cast<double>(1.0L / total);
}

NetworkParams levy_params(double lambda, int M, double eta) {
  NetworkParams p;
  p.lambda = lambda;
  p.alpha = 4.0;
  p.M = M;
  p.eta = eta;
  p.rho = 1.0;
  return p;
}

// E[(1 - exp(-x (Y + n)))^d] for the alpha = 4 shot noise, by quadrature.
double levy_sandwich(int d, double x, double lambda, int M, double n) {
  const double c = lambda * interference_coeff(M, 4.0);
  return oracle::integrate_0_inf([&](double y) {
    return std::pow(-std::expm1(-x * (y + n)), d) * oracle::levy_density(y, c);
  });
}

}  // namespace

TEST_SUITE("math_kernels") {

TEST_CASE("beta function examples") {
  CHECK(beta_fn(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  const double q = oracle::integrate_01(
      [](double t) { return 1.0 / std::sqrt(t * (1.0 - t)); });
  CHECK(beta_fn(0.5, 0.5) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(q == doctest::Approx(kPi).epsilon(1e-7));
  const double q23 = oracle::integrate_01([](double t) { return t * (1 - t) * (1 - t); });
  CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
  CHECK(q23 == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("beta function against quadrature on a grid") {
  for (double a : {0.7, 1.0, 2.5, 7.0, 20.0}) {
    for (double b : {0.7, 1.3, 4.0, 11.0, 30.0}) {
      const double q = oracle::integrate_01(
          [=](double t) { return std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0); });
      CHECK(beta_fn(a, b) == doctest::Approx(q).epsilon(1e-9));
    }
  }
  // Log-gamma route stays accurate where direct gammas would overflow.
  CHECK(beta_fn(50.0, 50.0) ==
        doctest::Approx(std::exp(2 * std::lgamma(50.0) - std::lgamma(100.0))).epsilon(1e-12));
}

TEST_CASE("beta function rejects non-positive arguments") {
  CHECK_THROWS_AS(beta_fn(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(beta_fn(1.0, -2.0), DomainError);
}

TEST_CASE("interference coefficient examples") {
  CHECK(interference_coeff(1, 4.0) == doctest::Approx(kPi * kPi / 2).epsilon(1e-13));
  CHECK(interference_coeff(2, 4.0) == doctest::Approx(3 * kPi * kPi / 4).epsilon(1e-13));
  for (double a : {2.5, 3.0, 4.0, 6.0}) {
    const double d = 2.0 / a;
    CHECK(interference_coeff(1, a) ==
          doctest::Approx(kPi * std::tgamma(1 + d) * std::tgamma(1 - d)).epsilon(1e-12));
  }
}

TEST_CASE("interference coefficient matches the gamma-moment form") {
  double worst = 0.0;
  for (double a : {2.5, 3.0, 4.0, 6.0}) {
    for (int m = 1; m <= 64; ++m) {
      worst = std::max(worst, std::abs(interference_coeff(m, a) / closed_form_im(m, a) - 1.0));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("interference coefficient grows in M with slope 2/alpha") {
  for (double a : {2.5, 4.0}) {
    for (int m = 1; m < 80; ++m) CHECK(interference_coeff(m + 1, a) > interference_coeff(m, a));
  }
  std::vector<double> x, y;
  for (int m = 64; m <= 1024; m *= 2) {
    x.push_back(m);
    y.push_back(interference_coeff(m, 4.0));
  }
  CHECK(slope(x, y) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("interference coefficient domain") {
  CHECK_THROWS_AS(interference_coeff(1, 2.0), DomainError);
  CHECK_THROWS_AS(interference_coeff(0, 4.0), DomainError);
}

TEST_CASE("laplace field basics") {
  CHECK(laplace_field(0.0, 1e-3, 4.0, 3) == 1.0);
  CHECK(laplace_field(5.0, 0.0, 4.0, 3) == 1.0);
  // lambda s^{2/alpha} I_M = 1 by construction.
  const double s = 2.0e4;
  const double lambda = 1.0 / (std::sqrt(s) * interference_coeff(2, 4.0));
  CHECK(laplace_field(s, lambda, 4.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("laplace field is monotone in s, lambda and M") {
  double prev = 1.0;
  for (double s = 1.0; s < 1e6; s *= 3) {
    const double v = laplace_field(s, 1e-4, 3.0, 2);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  CHECK(laplace_field(1e4, 2e-4, 4.0, 2) < laplace_field(1e4, 1e-4, 4.0, 2));
  CHECK(laplace_field(1e4, 1e-4, 4.0, 3) < laplace_field(1e4, 1e-4, 4.0, 2));
}

TEST_CASE("laplace field against simulated shot noise") {
  const double s = 3e4, lambda = 1e-4;
  oracle::ShotNoise y(lambda, 4.0, 1, 1000.0, 12345);
  std::vector<double> v(100000);
  for (auto& x : v) x = std::exp(-s * y());
  const auto [mean, se] = oracle::summarize(v);
  CHECK(std::abs(mean - laplace_field(s, lambda, 4.0, 1)) <= 3 * se);
}

TEST_CASE("noise factor") {
  CHECK(noise_laplace(123.0, 0.0, 1.0) == 1.0);
  CHECK(noise_laplace(0.0, 0.5, 1.0) == 1.0);
  CHECK(noise_laplace(3e4, 1e-5, 1.0) == doctest::Approx(std::exp(-0.3)).epsilon(1e-14));
  CHECK(noise_laplace(3e4, 1e-5, 1.0, NoiseSign::Printed) ==
        doctest::Approx(std::exp(0.3)).epsilon(1e-14));
  CHECK_THROWS_AS(noise_laplace(1.0, 0.1, 0.0), DomainError);
}

TEST_CASE("F coefficient examples") {
  for (double a : {2.5, 4.0, 6.0}) {
    for (double r : {0.0, 1e-3, 0.7}) CHECK(f_coeff(1, a, r) == doctest::Approx(1.0));
  }
  CHECK(f_coeff(2, 4.0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f_coeff(16, 4.0, 0.0) ==
        doctest::Approx(std::tgamma(0.5) * std::tgamma(16.0) / std::tgamma(15.5)).epsilon(1e-12));
}

TEST_CASE("F coefficient identity at zero noise") {
  double worst = 0.0;
  for (double a : {2.5, 3.0, 4.0, 6.0}) {
    for (int d = 1; d <= 32; ++d) {
      worst = std::max(worst, std::abs(f_coeff(d, a, 0.0) / closed_form_f(d, a) - 1.0));
    }
  }
  CHECK(worst <= 1e-9);
  std::vector<double> x, y;
  for (int d = 64; d <= 1024; d *= 2) {
    x.push_back(d);
    y.push_back(f_coeff(d, 4.0, 0.0));
  }
  CHECK(slope(x, y) == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("F coefficient with noise matches the naive double sum") {
  for (double a : {3.0, 4.0}) {
    for (double r : {1e-4, 0.01, 0.05}) {
      for (int d = 1; d <= 10; ++d) {
        CHECK(f_coeff(d, a, r) == doctest::Approx(naive_f(d, a, r)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("F coefficient rejects noise levels where its sum turns non-positive") {
  CHECK(naive_f(10, 4.0, 0.4) < 0.0);
  CHECK_THROWS_AS(f_coeff(10, 4.0, 0.4), DomainError);
}

TEST_CASE("chi-square CDF and bounds") {
  for (double x : {0.1, 1.0, 5.0}) {
    const Chi2Cdf c = chi2_cdf_and_bounds(1, x);
    CHECK(c.exact == doctest::Approx(-std::expm1(-x)));
    CHECK(c.lower == c.exact);
    CHECK(c.upper == c.exact);
  }
  const Chi2Cdf zero = chi2_cdf_and_bounds(5, 0.0);
  CHECK(zero.exact == 0.0);
  CHECK(zero.lower == 0.0);
  CHECK(zero.upper == 0.0);

  const Chi2Cdf c4 = chi2_cdf_and_bounds(4, 4.0);
  const double q = oracle::integrate(
      [](double t) { return t * t * t * std::exp(-t) / 6.0; }, 0.0, 4.0);
  CHECK(c4.exact == doctest::Approx(q).epsilon(1e-12));
  CHECK(c4.lower <= c4.exact);
  CHECK(c4.exact <= c4.upper);
}

TEST_CASE("chi-square sandwich holds on a grid") {
  for (int d = 1; d <= 16; ++d) {
    for (int i = 1; i <= 40; ++i) {
      const double x = 4.0 * d * i / 40.0;
      const Chi2Cdf c = chi2_cdf_and_bounds(d, x);
      CHECK(c.lower <= c.exact * (1 + 1e-12));
      CHECK(c.exact <= c.upper * (1 + 1e-12));
    }
  }
  CHECK(chi2_bound_scale(1) == 1.0);
  CHECK(chi2_bound_scale(4) == doctest::Approx(std::pow(24.0, -0.25)));
}

TEST_CASE("order statistic coefficient examples") {
  CHECK(order_stat_coeff(1, 4.0) == doctest::Approx(1.0));
  CHECK(order_stat_coeff(2, 4.0) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
  for (double a : {2.5, 4.0, 6.0}) {
    for (int n = 2; n <= 64; ++n) CHECK(order_stat_coeff(n, a) < order_stat_coeff(n - 1, a));
  }
}

TEST_CASE("order statistic coefficient equals the max-exponential moment") {
  // Quadrature oracle: E[H^{-delta}] / Gamma(1 - delta), H the max of N unit exponentials.
  for (int n : {2, 5, 19, 21, 41, 60}) {
    const double delta = 0.5;
    const double m = oracle::integrate_0_inf([&](double x) {
      return std::pow(x, -delta) * n * std::pow(-std::expm1(-x), n - 1) * std::exp(-x);
    });
    CHECK(order_stat_coeff(n, 4.0) == doctest::Approx(m / std::tgamma(1 - delta)).epsilon(1e-8));
  }
  // Sampling oracle at N = 2.
  std::mt19937_64 eng(7);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(1000000);
  for (auto& x : v) x = 1.0 / std::sqrt(std::max(e(eng), e(eng)));
  const auto [mean, se] = oracle::summarize(v);
  CHECK(std::abs(mean / std::sqrt(kPi) - order_stat_coeff(2, 4.0)) <= 3 * se / std::sqrt(kPi));
}

TEST_CASE("sandwich series reductions") {
  NetworkParams p = levy_params(1e-4, 1, 0.0);
  const double zeta = 3e4;
  const SandwichTerms t = sandwich_series(1, zeta, 1.0, p);
  CHECK(t.outage == doctest::Approx(1.0 - laplace_field(zeta, p.lambda, 4.0, 1)).epsilon(1e-13));
  CHECK(t.linear_coeff == doctest::Approx(1.0));
  for (int d = 1; d <= 30; ++d) {
    CHECK(sandwich_series(d, zeta, 0.37, p).linear_coeff ==
          doctest::Approx(order_stat_coeff(d, 4.0)).epsilon(1e-9));
  }
}

TEST_CASE("sandwich series against the exact shot-noise law") {
  // At alpha = 4 the shot noise is Levy distributed, so the expectation has a
  // one-dimensional quadrature form for any d.
  for (int d : {1, 4, 9, 16, 25, 40}) {
    for (double eta : {0.0, 1e-6}) {
      NetworkParams p = levy_params(2e-4, 2, eta);
      const double theta = chi2_bound_scale(d);
      const double expected = levy_sandwich(d, theta * 3e4, p.lambda, 2, eta);
      CHECK(sandwich_series(d, 3e4, theta, p).outage ==
            doctest::Approx(expected).epsilon(1e-7).scale(1e-14));
    }
  }
}

TEST_CASE("sandwich series against simulated shot noise") {
  NetworkParams p = levy_params(1e-4, 2, 1e-6);
  const double theta = std::pow(24.0, -0.25);
  const double x = theta * 3e4;
  oracle::ShotNoise y(p.lambda, 4.0, 2, 1000.0, 99);
  std::vector<double> v(100000);
  for (auto& s : v) s = std::pow(-std::expm1(-x * (y() + 1e-6)), 4);
  const auto [mean, se] = oracle::summarize(v);
  CHECK(std::abs(sandwich_series(4, 3e4, theta, p).outage - mean) <= 3 * se);
}

TEST_CASE("sandwich linear coefficient with noise weights") {
  NetworkParams p = levy_params(1e-4, 1, 2e-5);
  const double zeta = 3e4, theta = 0.8;
  for (int d = 1; d <= 12; ++d) {
    long double s = 0.0L;
    for (int n = 1; n <= d; ++n) {
      const long double binom = std::tgamma(static_cast<long double>(d + 1)) /
                                (std::tgamma(static_cast<long double>(n + 1)) *
                                 std::tgamma(static_cast<long double>(d - n + 1)));
      s += binom * ((n % 2) ? 1 : -1) * std::sqrt(static_cast<long double>(n)) *
           std::exp(-static_cast<long double>(n) * theta * zeta * 2e-5);
    }
    CHECK(sandwich_series(d, zeta, theta, p).linear_coeff ==
          doctest::Approx(static_cast<double>(s)).epsilon(1e-8));
  }
}

}  // TEST_SUITE
