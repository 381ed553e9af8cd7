#pragma once

// Closed-form outage probabilities, maximum contention densities and area
// spectral efficiency for the SDMA schemes.

#include "tcap/network.hpp"

namespace tcap::analytic {

/// Chernoff-style success-probability upper bound for a Gamma(d) signal:
/// L_Y(s) L_N(s / rho) at s = beta D^alpha / (4 d), noise factor with the
/// printed (positive) exponent.  Clamped to 1.
double outage_upper_lemma1(const NetworkParams& params, int d);

struct OutageBracket {
  double lower;
  double upper;
};

/// Outage of a Gamma(d) signal bracketed by the chi-square CDF sandwich,
/// evaluated at arguments c*zeta and zeta, c = (d!)^{-1/d}.
OutageBracket outage_sandwich_lemma2(const NetworkParams& params, int d);

enum class DpcMethod { UpperBound, SmallEps, Sandwich };

/// DPC to K multi-antenna receivers (signal dof M*N, marks I_M).
///  - UpperBound: the Chernoff-bound density
///      (4MN)^{2/a} / (I_M b^{2/a} D^2) [-log(1-eps) + eta b D^a / (4 M N rho)].
///  - SmallEps: F_{MN} eps e^{-eta b D^a / rho} / (I_M b^{2/a} D^2).
///  - Sandwich: lambda_eps is the lower bound; `bracket` holds [lower, upper].
DensityResult density_dpc_mimo(const NetworkParams& params, DpcMethod method);

/// DPC to M single-antenna receivers; requires N = 1.
DensityResult density_dpc_miso(const NetworkParams& params);

enum class ZfVariant { Multi, RxZf, Miso };

enum class ZfMisoForm {
  Exact,     // [-log(1-eps) - eta b D^a / rho] / (I_M b^{2/a} D^2), clamped at 0
  SmallEps,  // eps e^{-eta b D^a / rho} / (I_M b^{2/a} D^2)
};

DensityResult density_zf(const NetworkParams& params, ZfVariant variant,
                         ZfMisoForm miso_form = ZfMisoForm::Exact);

/// ZF with receive antenna selection, small-outage density
///   eps e^{-w} / (S~_N I_M b^{2/a} D^2),
/// with S~_N = e^{w} S_{N,1}(w) the noise-weighted order-statistic coefficient
/// (S~_N = S_N when eta = 0, S~_1 = 1).
DensityResult density_zf_antsel(const NetworkParams& params);

/// Noise-weighted order-statistic coefficient used by density_zf_antsel.
double antsel_coefficient(const NetworkParams& params);

/// Block diagonalization upper bound F_r eps e^{-w} / (I_K b^{2/a} D^2),
/// r = N M - (K-1) N^2.
DensityResult density_bd(const NetworkParams& params);

/// K lambda (1 - eps) log2(1 + beta).
double area_spectral_efficiency(const NetworkParams& params, double lambda_eps);

/// Theoretical exponent of ASE in the antenna count along the scheme's
/// reference scaling path (M = N for DPC-MIMO and antenna selection,
/// M = K N for ZF-MULTI and BD with the exponent taken in N).
double scaling_exponent(Scheme scheme, double alpha);

/// Outage at lambda = 0, i.e. the pure noise floor.
double noise_floor(Scheme scheme, const NetworkParams& params);

/// Exact outage probability at params.lambda for schemes whose signal law
/// admits a Laplace-domain expression (SISO, ZF-MISO, ZF-ANTSEL).
double exact_outage(Scheme scheme, const NetworkParams& params);

bool has_exact_outage(Scheme scheme);

/// Inverts exact_outage(lambda) = eps by bracket doubling and bisection.
DensityResult exact_density_root(Scheme scheme, const NetworkParams& params,
                                 double rel_tol = 1e-6);

/// Dispatches a (scheme, method) pair to the matching closed form.
/// Sandwich is reachable through DensityMethod::LowerBound for DPC-MIMO-UB.
DensityResult analytic_density(Scheme scheme, const NetworkParams& params, DensityMethod method);

/// Method used when a sweep or command does not name one.
DensityMethod default_method(Scheme scheme);

}  // namespace tcap::analytic
