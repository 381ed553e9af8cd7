#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>

namespace tcap {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based generator: the stream (seed, stream_id) is a pure function of
/// its two keys, so trial i draws the same numbers no matter which thread runs
/// it or in which order.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on (0, 1]; never returns exactly zero.
  double uniform();
  double exponential();
  double normal();
  /// Circularly symmetric complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal();
  std::uint64_t poisson(double mean);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int next_word_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Gamma(shape, 1) sampler with the Marsaglia-Tsang constants precomputed.
class GammaSampler {
 public:
  explicit GammaSampler(double shape);

  double operator()(CounterRng& rng) const;
  double shape() const { return shape_; }

 private:
  double shape_;
  double d_;
  double c_;
};

/// Mixes a 64-bit value (SplitMix64 finalizer); used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace tcap
