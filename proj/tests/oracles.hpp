#pragma once

// Reference computations for the test suites.  They deliberately avoid the
// library's code paths: std:: random engines instead of the counter RNG,
// quadrature instead of series, naive loops instead of compensated sums.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double integrate_01(const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, 0.0, 1.0);
}

inline double integrate_0_inf(const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

inline double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

struct MeanSe {
  double mean;
  double se;
};

inline MeanSe summarize(const std::vector<double>& v) {
  double s = 0.0, s2 = 0.0;
  for (double x : v) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(v.size());
  const double m = s / n;
  return {m, std::sqrt(std::max(0.0, s2 / n - m * m) / n)};
}

/// Shot noise Y = sum I_i r_i^{-alpha} on a disc of radius R, Gamma(marks) marks.
class ShotNoise {
 public:
  ShotNoise(double lambda, double alpha, int marks, double radius, std::uint64_t seed)
      : alpha_(alpha), radius_(radius), count_(lambda * std::numbers::pi * radius * radius),
        mark_(marks, 1.0), engine_(seed) {}

  double operator()() {
    const auto n = count_(engine_);
    double y = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r2 = radius_ * radius_ * unit_(engine_);
      y += mark_(engine_) * std::pow(r2, -0.5 * alpha_);
    }
    return y;
  }

 private:
  double alpha_;
  double radius_;
  std::poisson_distribution<int> count_;
  std::gamma_distribution<double> mark_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::mt19937_64 engine_;
};

/// Density of the shot noise at alpha = 4, which is Levy with
/// E[e^{-sY}] = exp(-c sqrt(s)), c = lambda I_M: f(y) = c/(2 sqrt(pi)) y^{-3/2} e^{-c^2/(4y)}.
inline double levy_density(double y, double c) {
  if (!(y > 0.0)) return 0.0;
  return c / (2.0 * std::sqrt(std::numbers::pi)) * std::exp(-1.5 * std::log(y) - c * c / (4.0 * y));
}

/// Cramer-von Mises statistic of samples already mapped through their CDF.
inline double cramer_von_mises(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double t = 1.0 / (12.0 * n);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double e = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n) - u[i];
    t += e * e;
  }
  return t;
}

/// Asymptotic 1% critical value of the Cramer-von Mises statistic.
inline constexpr double kCvm1pct = 0.7435;

template <typename Cdf>
double cramer_von_mises(const std::vector<double>& samples, Cdf cdf) {
  std::vector<double> u;
  u.reserve(samples.size());
  for (double x : samples) u.push_back(cdf(x));
  return cramer_von_mises(std::move(u));
}

}  // namespace oracle
