#pragma once

// Special functions and coefficient families of the Poisson shot-noise model.
//
// Convention: a "chi-square with 2d degrees of freedom" variate is the sum of
// d unit-mean exponentials, i.e. Gamma(shape d, scale 1), mean d.

#include "tcap/network.hpp"

namespace tcap::kernels {

/// Alternating binomial sums above this order switch to their integral
/// representation (or to multiprecision when no integral form exists).
inline constexpr int kAlternatingSeriesLimit = 20;

/// Thread-safe log-gamma.
double log_gamma(double x);

/// Beta function via log-gamma.  Throws DomainError unless a, b > 0.
double beta_fn(double a, double b);

/// Shot-noise interference coefficient for Gamma(M)-distributed marks:
///   I_M = (2 pi / alpha) sum_{m=0}^{M-1} C(M, m) B(m + 2/alpha, M - m - 2/alpha).
/// Equals pi Gamma(1-2/alpha) Gamma(M+2/alpha) / Gamma(M).
double interference_coeff(int M, double alpha);

/// Laplace transform of the aggregate interference: exp(-lambda s^{2/alpha} I_M).
double laplace_field(double s, double lambda, double alpha, int M);

enum class NoiseSign {
  Attenuating,  // e^{-s eta / rho}: exact success-probability path
  Printed,      // e^{+s eta / rho}: the Chernoff-style bound path
};

/// Noise factor L_N(s / rho).
double noise_laplace(double s, double eta, double rho,
                     NoiseSign sign = NoiseSign::Attenuating);

/// Small-outage coefficient F_d of a Gamma(d) signal, computed from the double
/// sum over k < d, j <= k.  F_1 = 1; with no noise
/// F_d = Gamma(1-2/alpha) Gamma(d) / Gamma(d-2/alpha).
double f_coeff(int d, double alpha, double eta_over_rho);

struct Chi2Cdf {
  double exact;  // regularized lower incomplete gamma P(d, x)
  double lower;  // (1 - e^{-c x})^d, c = (d!)^{-1/d}
  double upper;  // (1 - e^{-x})^d
};

Chi2Cdf chi2_cdf_and_bounds(int d, double x);

/// S_N = sum_{n=1}^{N} C(N,n) (-1)^{n+1} n^{2/alpha}
///     = E[max of N unit exponentials ^{-2/alpha}] / Gamma(1 - 2/alpha).
double order_stat_coeff(int N, double alpha);

struct SandwichTerms {
  /// E[(1 - exp(-vartheta zeta (Y + eta/rho)))^d], expanded over k = 0..d.
  double outage;
  /// Small-lambda slope coefficient
  /// S_{d,vartheta} = sum_{n=1}^{d} C(d,n) (-1)^{n+1} n^{2/alpha} e^{-n vartheta zeta eta/rho}.
  double linear_coeff;
};

/// Binomially expanded chi-square bound series.  The interference marks have
/// Gamma(mark_shape) law; mark_shape = 0 selects params.M.
SandwichTerms sandwich_series(int d, double zeta, double vartheta,
                              const NetworkParams& params, int mark_shape = 0);

/// (d!)^{-1/d}, the scale of the lower chi-square CDF bound.
double chi2_bound_scale(int d);

}  // namespace tcap::kernels
