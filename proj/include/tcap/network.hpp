#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tcap {

/// Scalar model of one SDMA ad hoc network: PPP density, path loss, link
/// geometry, powers, SINR target, outage constraint and antenna counts.
///
/// Densities are per m^2, distances in meters, powers linear.
struct NetworkParams {
  double lambda = 0.0;
  double alpha = 4.0;
  double distance = 10.0;
  double rho = 1.0;
  double eta = 0.0;
  double beta = 3.0;
  double epsilon = 0.1;
  int M = 1;  // transmit antennas
  int N = 1;  // receive antennas per receiver
  int K = 1;  // receivers served per transmitter

  /// 2/alpha, the exponent that governs every shot-noise functional.
  double delta() const { return 2.0 / alpha; }
  double eta_over_rho() const { return eta / rho; }
  /// beta * D^alpha, the SINR threshold referred to the link gain.
  double zeta() const;
  /// beta^{2/alpha} D^2, the common denominator of every density formula.
  double geometry_factor() const;

  bool operator==(const NetworkParams&) const = default;
};

/// Throws DomainError when a field is outside its admissible range.
void validate(const NetworkParams& params);

enum class Scheme {
  DpcMimoUb,
  DpcMiso,
  ZfMulti,
  ZfRxZf,
  ZfAntSel,
  ZfMiso,
  BdUb,
  SisoBaseline,
};

inline constexpr std::array<Scheme, 8> kAllSchemes = {
    Scheme::DpcMimoUb, Scheme::DpcMiso, Scheme::ZfMulti, Scheme::ZfRxZf,
    Scheme::ZfAntSel,  Scheme::ZfMiso,  Scheme::BdUb,    Scheme::SisoBaseline};

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

enum class SignalLawKind {
  Gamma,           // sum of `dof` unit exponentials
  MaxExponential,  // max of `dof` unit exponentials
};

struct SignalLaw {
  SignalLawKind kind;
  int dof;
};

/// Law of the useful-signal fading H0 for a scheme at the given antenna counts.
SignalLaw signal_law(Scheme scheme, const NetworkParams& params);

/// Gamma shape of the interference marks, i.e. the index of the I_M coefficient.
int mark_shape(Scheme scheme, const NetworkParams& params);

/// Throws PreconditionError when the antenna configuration is infeasible.
void check_feasible(Scheme scheme, const NetworkParams& params);

/// Forces the antenna counts a scheme implies (SISO -> 1x1x1, MISO schemes
/// -> N = 1, K = M where the receivers are single-antenna users).
NetworkParams adapt_to_scheme(Scheme scheme, NetworkParams params);

struct Interval {
  double low;
  double high;
};

enum class DensityMethod {
  SmallEps,
  UpperBound,
  LowerBound,
  ExactRoot,
  McRoot,
};

std::string_view to_string(DensityMethod method);

/// Maximum contention density under the outage constraint and the resulting
/// area spectral efficiency.
struct DensityResult {
  Scheme scheme = Scheme::SisoBaseline;
  DensityMethod method = DensityMethod::SmallEps;
  double lambda_eps = 0.0;
  double ase = 0.0;
  /// Outage at lambda = 0 already exceeds epsilon; lambda_eps is forced to 0.
  bool noise_limited = false;
  /// Analytic sandwich [lower, upper] or the final Monte Carlo bisection bracket.
  std::optional<Interval> bracket;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

}  // namespace tcap
