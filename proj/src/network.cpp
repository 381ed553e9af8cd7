#include "tcap/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "tcap/errors.hpp"

namespace tcap {

double NetworkParams::zeta() const { return beta * std::pow(distance, alpha); }

double NetworkParams::geometry_factor() const {
  return std::pow(beta, delta()) * distance * distance;
}

void validate(const NetworkParams& p) {
  auto fail = [](const std::string& field, const std::string& rule) {
    throw DomainError(field + " must be " + rule);
  };
  if (!(p.alpha > 2.0) || !std::isfinite(p.alpha)) fail("alpha", "> 2");
  if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) fail("lambda", ">= 0");
  if (!(p.distance > 0.0)) fail("distance", "> 0");
  if (!(p.rho > 0.0)) fail("rho", "> 0");
  if (!(p.eta >= 0.0)) fail("eta", ">= 0");
  if (!(p.beta >= 0.0)) fail("beta", ">= 0");
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) fail("epsilon", "in (0, 1)");
  if (p.M < 1) fail("M", ">= 1");
  if (p.N < 1) fail("N", ">= 1");
  if (p.K < 1 || p.K > p.M) fail("K", "in [1, M]");
}

namespace {

struct SchemeName {
  Scheme scheme;
  std::string_view name;
};

constexpr std::array<SchemeName, 8> kSchemeNames = {{
    {Scheme::DpcMimoUb, "DPC-MIMO-UB"},
    {Scheme::DpcMiso, "DPC-MISO"},
    {Scheme::ZfMulti, "ZF-MULTI"},
    {Scheme::ZfRxZf, "ZF-RXZF"},
    {Scheme::ZfAntSel, "ZF-ANTSEL"},
    {Scheme::ZfMiso, "ZF-MISO"},
    {Scheme::BdUb, "BD-UB"},
    {Scheme::SisoBaseline, "SISO-BASELINE"},
}};

}  // namespace

std::string_view to_string(Scheme scheme) {
  for (const auto& entry : kSchemeNames) {
    if (entry.scheme == scheme) return entry.name;
  }
  return "UNKNOWN";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (const auto& entry : kSchemeNames) {
    if (entry.name == upper) return entry.scheme;
  }
  return std::nullopt;
}

std::string_view to_string(DensityMethod method) {
  switch (method) {
    case DensityMethod::SmallEps: return "small-eps";
    case DensityMethod::UpperBound: return "upper-bound";
    case DensityMethod::LowerBound: return "lower-bound";
    case DensityMethod::ExactRoot: return "exact-root";
    case DensityMethod::McRoot: return "mc-root";
  }
  return "unknown";
}

SignalLaw signal_law(Scheme scheme, const NetworkParams& p) {
  switch (scheme) {
    case Scheme::DpcMimoUb: return {SignalLawKind::Gamma, p.M * p.N};
    case Scheme::DpcMiso: return {SignalLawKind::Gamma, p.M};
    case Scheme::ZfMulti: return {SignalLawKind::Gamma, p.M - p.K * p.N + 1};
    case Scheme::ZfRxZf: return {SignalLawKind::Gamma, p.N - p.M + 1};
    case Scheme::ZfAntSel: return {SignalLawKind::MaxExponential, p.N};
    case Scheme::ZfMiso: return {SignalLawKind::Gamma, p.M - p.K + 1};
    case Scheme::BdUb: return {SignalLawKind::Gamma, p.N * p.M - (p.K - 1) * p.N * p.N};
    case Scheme::SisoBaseline: return {SignalLawKind::Gamma, 1};
  }
  throw PreconditionError("unknown scheme");
}

int mark_shape(Scheme scheme, const NetworkParams& p) {
  switch (scheme) {
    case Scheme::DpcMimoUb:
    case Scheme::DpcMiso:
    case Scheme::ZfAntSel:
    case Scheme::ZfMiso:
    case Scheme::ZfRxZf: return p.M;
    case Scheme::ZfMulti: return p.K * p.N;
    case Scheme::BdUb: return p.K;
    case Scheme::SisoBaseline: return 1;
  }
  throw PreconditionError("unknown scheme");
}

void check_feasible(Scheme scheme, const NetworkParams& p) {
  auto fail = [scheme](const std::string& rule) {
    throw PreconditionError(std::string(to_string(scheme)) + " requires " + rule);
  };
  if (p.M < 1 || p.N < 1 || p.K < 1) fail("positive antenna counts");
  if (p.K > p.M) fail("K <= M");
  switch (scheme) {
    case Scheme::DpcMimoUb: break;
    case Scheme::DpcMiso:
      if (p.N != 1) fail("N = 1");
      break;
    case Scheme::ZfMulti:
      if (p.M < p.K * p.N) fail("M >= K*N");
      break;
    case Scheme::ZfRxZf:
      if (p.N <= p.M) fail("N > M");
      break;
    case Scheme::ZfAntSel:
      if (p.K != p.M) fail("K = M");
      break;
    case Scheme::ZfMiso:
      if (p.N != 1 || p.K != p.M) fail("N = 1 and K = M");
      break;
    case Scheme::BdUb:
      if (p.M < p.K * p.N) fail("M >= K*N");
      break;
    case Scheme::SisoBaseline:
      if (p.M != 1 || p.N != 1 || p.K != 1) fail("M = N = K = 1");
      break;
  }
}

NetworkParams adapt_to_scheme(Scheme scheme, NetworkParams p) {
  switch (scheme) {
    case Scheme::SisoBaseline: p.M = p.N = p.K = 1; break;
    case Scheme::DpcMiso: p.N = 1; break;
    case Scheme::ZfMiso:
      p.N = 1;
      p.K = p.M;
      break;
    case Scheme::ZfAntSel: p.K = p.M; break;
    default: break;
  }
  return p;
}

}  // namespace tcap
