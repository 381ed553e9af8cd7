#pragma once

#include <stdexcept>
#include <string>

namespace tcap {

/// Argument outside the mathematical domain of a formula (alpha <= 2, a <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Antenna configuration or parameter combination a scheme cannot serve.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested operation has no closed form for this scheme.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A stacked channel matrix came out numerically rank deficient.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stochastic root search ran out of budget before the bracket was resolved.
class InconclusiveError : public std::runtime_error {
 public:
  InconclusiveError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}

  double bracket_low() const noexcept { return lo_; }
  double bracket_high() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

}  // namespace tcap
