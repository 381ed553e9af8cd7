#pragma once

// Poisson interferer fields, Rayleigh MIMO channels, explicit ZF / BD
// precoders and per-trial SINR realizations.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "tcap/network.hpp"
#include "tcap/rng.hpp"

namespace tcap::sim {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;

struct Point2 {
  double x;
  double y;
};

/// One sampled interferer field on a disc centred at the typical receiver.
/// The typical transmitter is not part of the field.
struct FieldRealization {
  std::vector<Point2> positions;
  double window_radius = 0.0;
  double density = 0.0;
};

/// max(10 / sqrt(lambda), 100 D); 100 D when lambda = 0.
double default_window_radius(double lambda, double distance);

FieldRealization sample_field(double lambda, double window_radius, CounterRng& rng);

/// rows x cols matrix of i.i.d. CN(0, 1) entries.
CMatrix sample_channel(int rows, int cols, CounterRng& rng);

/// Direct channels H_{0k}, one N x M matrix per served receiver.
struct ChannelSet {
  std::vector<CMatrix> direct;
};

ChannelSet sample_channel_set(int K, int N, int M, CounterRng& rng);

/// Beamformers of one transmitter.  ZF: one M x 1 block per stream.  BD: one
/// M x (M - (K-1) N) orthonormal block per receiver.
struct PrecoderSet {
  Scheme scheme = Scheme::ZfMiso;
  std::vector<CMatrix> blocks;

  /// All blocks side by side (M x total columns).
  CMatrix stacked() const;
};

/// Column-normalized pseudo-inverse of an r x M channel stack, r <= M.
/// Row i of `stacked` is orthogonal to every column j != i.
/// Throws RankDeficientError for a numerically singular stack.
PrecoderSet zf_precoder(const CMatrix& stacked);

struct BdLink {
  CMatrix basis;      // M x (M - (K-1) N), orthonormal columns
  CMatrix effective;  // G_k = H_k * basis
  double frobenius_gain;
  double mu_max_gain;  // largest squared singular value of G_k
};

struct BdPrecoder {
  std::vector<BdLink> links;
  PrecoderSet precoders() const;
};

/// Null-space (SVD) block diagonalization.  Throws PreconditionError unless
/// M >= K N for K channels of size N x M.
BdPrecoder bd_precoder(const std::vector<CMatrix>& channels);

enum class GainModel {
  Explicit,   // construct channels and precoders
  Surrogate,  // draw directly from the scheme's signal law
};

enum class MarkModel {
  Surrogate,  // Gamma(mark_shape, 1)
  Explicit,   // interferer builds its own precoder; mark = ||u^H H_i W||^2
};

enum class AntSelMode {
  Model,     // pick the receive antenna with the largest post-ZF gain
  Physical,  // pick the antenna with the largest channel norm, then ZF
};

enum class BdGain { Frobenius, MuMax };

enum class PowerConvention {
  PerStream,   // rho per stream on both signal and interference
  TotalSplit,  // rho / streams per stream
};

struct SimOptions {
  GainModel signal = GainModel::Explicit;
  MarkModel marks = MarkModel::Surrogate;
  AntSelMode antsel = AntSelMode::Model;
  BdGain bd_gain = BdGain::Frobenius;
  PowerConvention power = PowerConvention::PerStream;
  std::optional<double> window_radius;

  bool operator==(const SimOptions&) const = default;
};

/// Direct channels sized for the scheme (K receivers, N x M each).
ChannelSet sample_scheme_channels(Scheme scheme, const NetworkParams& params, CounterRng& rng);

/// Useful-signal fading H0 of stream 0 for one realization of `channels`.
/// With GainModel::Surrogate the channels are ignored.
double signal_gain(Scheme scheme, const NetworkParams& params, const ChannelSet& channels,
                   const SimOptions& options, CounterRng& rng);

/// Interference mark I_i of one interferer running the same scheme.
double interference_mark(Scheme scheme, const NetworkParams& params, const SimOptions& options,
                         CounterRng& rng);

/// rho H0 D^{-alpha} / (rho Y + eta) for a given signal fading H0 and shot
/// noise Y = sum_i I_i |X_i|^{-alpha}; +inf when the denominator is zero.
double sinr_value(double h0, double interference, const NetworkParams& params, double rho);

/// Number of streams a transmitter sends under the scheme.
int stream_count(Scheme scheme, const NetworkParams& params);

/// Fixed-per-run quantities of one SINR realization.
class LinkSimulator {
 public:
  LinkSimulator(Scheme scheme, const NetworkParams& params, const SimOptions& options);

  /// Full SINR of one realization drawn from `rng`.
  double sinr(CounterRng& rng) const;

  /// Same draws as sinr(rng) >= beta, with early exit once interference
  /// alone forces an outage.
  bool success(CounterRng& rng) const;

  double window_radius() const { return radius_; }
  const NetworkParams& params() const { return params_; }

 private:
  double draw_signal(CounterRng& rng) const;
  double draw_mark(CounterRng& rng) const;
  double path_gain(double r2) const;

  Scheme scheme_;
  NetworkParams params_;
  SimOptions options_;
  double radius_;
  double mean_count_;
  double rho_eff_;
  double signal_path_;  // D^{-alpha}
  GammaSampler signal_sampler_;
  GammaSampler mark_sampler_;
  bool alpha_is_four_;
};

/// Convenience wrapper: one SINR sample.
double sinr_sample(Scheme scheme, const NetworkParams& params, const SimOptions& options,
                   CounterRng& rng);

}  // namespace tcap::sim
