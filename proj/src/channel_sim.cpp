#include "tcap/channel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tcap/errors.hpp"

namespace tcap::sim {

namespace {

constexpr double kRankTolerance = 1e-12;

// Orthonormal basis of the orthogonal complement of the row space of `rows`
// (r x M, r < M), as an M x (M - r) matrix.
CMatrix row_space_complement(const CMatrix& rows) {
  const auto M = rows.cols();
  if (rows.rows() == 0) return CMatrix::Identity(M, M);
  Eigen::JacobiSVD<CMatrix> svd(rows, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < kRankTolerance * sv(0)) {
    throw RankDeficientError("channel stack is rank deficient");
  }
  return svd.matrixV().rightCols(M - rows.rows());
}

CVector random_unit_vector(int n, CounterRng& rng) {
  CVector u(n);
  for (int i = 0; i < n; ++i) u(i) = rng.complex_normal();
  return u / u.norm();
}

CMatrix stack_rows(const std::vector<CMatrix>& blocks) {
  Eigen::Index rows = 0;
  for (const auto& b : blocks) rows += b.rows();
  CMatrix out(rows, blocks.front().cols());
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return out;
}

// Transmit beamformers (M x streams) an interferer uses under the scheme.
CMatrix interferer_beamformers(Scheme scheme, const NetworkParams& p, CounterRng& rng) {
  switch (scheme) {
    case Scheme::DpcMimoUb:
    case Scheme::DpcMiso: {
      // DPC covariance is not constructed; M orthonormal directions stand in for it.
      const CMatrix g = sample_channel(p.M, p.M, rng);
      Eigen::HouseholderQR<CMatrix> qr(g);
      return qr.householderQ() * CMatrix::Identity(p.M, p.M);
    }
    case Scheme::ZfRxZf: return CMatrix::Identity(p.M, p.M);
    case Scheme::SisoBaseline: return CMatrix::Identity(1, 1);
    case Scheme::ZfMiso:
    case Scheme::ZfAntSel:
    case Scheme::ZfMulti: {
      const int rows = scheme == Scheme::ZfMulti ? p.K * p.N : p.K;
      while (true) {
        try {
          return zf_precoder(sample_channel(rows, p.M, rng)).stacked();
        } catch (const RankDeficientError&) {
        }
      }
    }
    case Scheme::BdUb: {
      while (true) {
        try {
          const BdPrecoder bd = bd_precoder(sample_channel_set(p.K, p.N, p.M, rng).direct);
          CMatrix w(p.M, p.K);
          for (int k = 0; k < p.K; ++k) {
            const auto& link = bd.links[k];
            Eigen::JacobiSVD<CMatrix> svd(link.effective, Eigen::ComputeThinV);
            w.col(k) = link.basis * svd.matrixV().col(0);
          }
          return w;
        } catch (const RankDeficientError&) {
        }
      }
    }
  }
  throw PreconditionError("unknown scheme");
}

}  // namespace

double default_window_radius(double lambda, double distance) {
  const double floor_radius = 100.0 * distance;
  if (!(lambda > 0.0)) return floor_radius;
  return std::max(10.0 / std::sqrt(lambda), floor_radius);
}

FieldRealization sample_field(double lambda, double window_radius, CounterRng& rng) {
  if (!(lambda >= 0.0)) throw DomainError("sample_field requires lambda >= 0");
  if (!(window_radius > 0.0)) throw DomainError("sample_field requires a positive radius");
  FieldRealization field;
  field.window_radius = window_radius;
  field.density = lambda;
  const auto count = rng.poisson(lambda * std::numbers::pi * window_radius * window_radius);
  field.positions.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double r = window_radius * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    field.positions.push_back({r * std::cos(theta), r * std::sin(theta)});
  }
  return field;
}

CMatrix sample_channel(int rows, int cols, CounterRng& rng) {
  CMatrix h(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) h(i, j) = rng.complex_normal();
  }
  return h;
}

ChannelSet sample_channel_set(int K, int N, int M, CounterRng& rng) {
  ChannelSet set;
  set.direct.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) set.direct.push_back(sample_channel(N, M, rng));
  return set;
}

CMatrix PrecoderSet::stacked() const {
  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  CMatrix out(blocks.empty() ? 0 : blocks.front().rows(), cols);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

PrecoderSet zf_precoder(const CMatrix& stacked) {
  const auto r = stacked.rows();
  const auto M = stacked.cols();
  if (r < 1 || r > M) throw PreconditionError("zf_precoder needs 1 <= rows <= M");
  // H^H = Q R  =>  pinv(H) = Q R^{-H}.
  Eigen::HouseholderQR<CMatrix> qr(stacked.adjoint());
  const CMatrix R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const Eigen::VectorXd diag = R.diagonal().cwiseAbs();
  if (diag.minCoeff() < kRankTolerance * diag.maxCoeff()) {
    throw RankDeficientError("zf_precoder: channel stack is rank deficient");
  }
  const CMatrix Q = qr.householderQ() * CMatrix::Identity(M, r);
  const CMatrix inv_rh =
      R.adjoint().triangularView<Eigen::Lower>().solve(CMatrix::Identity(r, r));
  const CMatrix W = Q * inv_rh;
  PrecoderSet out;
  out.scheme = Scheme::ZfMiso;
  out.blocks.reserve(static_cast<std::size_t>(r));
  for (Eigen::Index j = 0; j < r; ++j) out.blocks.push_back(W.col(j).normalized());
  return out;
}

PrecoderSet BdPrecoder::precoders() const {
  PrecoderSet out;
  out.scheme = Scheme::BdUb;
  for (const auto& link : links) out.blocks.push_back(link.basis);
  return out;
}

BdPrecoder bd_precoder(const std::vector<CMatrix>& channels) {
  if (channels.empty()) throw PreconditionError("bd_precoder needs at least one channel");
  const auto K = static_cast<Eigen::Index>(channels.size());
  const auto N = channels.front().rows();
  const auto M = channels.front().cols();
  if (M < K * N) throw PreconditionError("bd_precoder requires M >= K*N");
  BdPrecoder out;
  out.links.reserve(channels.size());
  for (Eigen::Index k = 0; k < K; ++k) {
    std::vector<CMatrix> others;
    for (Eigen::Index j = 0; j < K; ++j) {
      if (j != k) others.push_back(channels[j]);
    }
    BdLink link;
    link.basis = others.empty() ? CMatrix(CMatrix::Identity(M, M))
                                : row_space_complement(stack_rows(others));
    link.effective = channels[k] * link.basis;
    link.frobenius_gain = link.effective.squaredNorm();
    Eigen::JacobiSVD<CMatrix> svd(link.effective);
    const double top = svd.singularValues()(0);
    link.mu_max_gain = top * top;
    out.links.push_back(std::move(link));
  }
  return out;
}

ChannelSet sample_scheme_channels(Scheme scheme, const NetworkParams& p, CounterRng& rng) {
  if (scheme == Scheme::SisoBaseline) return sample_channel_set(1, 1, 1, rng);
  return sample_channel_set(p.K, p.N, p.M, rng);
}

int stream_count(Scheme scheme, const NetworkParams& p) {
  switch (scheme) {
    case Scheme::ZfMulti: return p.K * p.N;
    case Scheme::ZfRxZf: return p.M;
    case Scheme::SisoBaseline: return 1;
    default: return p.K;
  }
}

double signal_gain(Scheme scheme, const NetworkParams& p, const ChannelSet& channels,
                   const SimOptions& options, CounterRng& rng) {
  if (options.signal == GainModel::Surrogate) {
    const SignalLaw law = signal_law(scheme, p);
    if (law.kind == SignalLawKind::MaxExponential) {
      double best = 0.0;
      for (int n = 0; n < law.dof; ++n) best = std::max(best, rng.exponential());
      return best;
    }
    return GammaSampler(law.dof)(rng);
  }
  const auto& H = channels.direct;
  switch (scheme) {
    case Scheme::DpcMimoUb:
    case Scheme::DpcMiso:
    case Scheme::SisoBaseline: return H.front().squaredNorm();
    case Scheme::ZfMiso:
    case Scheme::ZfMulti: {
      const CMatrix stack = stack_rows(H);
      const PrecoderSet w = zf_precoder(stack);
      return std::norm((stack.row(0) * w.blocks.front())(0, 0));
    }
    case Scheme::ZfRxZf: {
      const CMatrix& h = H.front();
      const CVector own = h.col(0);
      if (h.cols() == 1) return own.squaredNorm();
      Eigen::HouseholderQR<CMatrix> qr(h.rightCols(h.cols() - 1));
      const CMatrix q = qr.householderQ() * CMatrix::Identity(h.rows(), h.cols() - 1);
      return (own - q * (q.adjoint() * own)).squaredNorm();
    }
    case Scheme::ZfAntSel: {
      if (options.antsel == AntSelMode::Model) {
        std::vector<CMatrix> others;
        for (std::size_t j = 1; j < H.size(); ++j) others.push_back(H[j].topRows(1));
        const CMatrix complement = others.empty()
                                       ? CMatrix(CMatrix::Identity(p.M, p.M))
                                       : row_space_complement(stack_rows(others));
        return (H.front() * complement).rowwise().squaredNorm().maxCoeff();
      }
      std::vector<CMatrix> selected;
      for (const auto& hk : H) {
        Eigen::Index best = 0;
        hk.rowwise().squaredNorm().maxCoeff(&best);
        selected.push_back(hk.row(best));
      }
      const CMatrix stack = stack_rows(selected);
      const PrecoderSet w = zf_precoder(stack);
      return std::norm((stack.row(0) * w.blocks.front())(0, 0));
    }
    case Scheme::BdUb: {
      const BdPrecoder bd = bd_precoder(H);
      const auto& link = bd.links.front();
      return options.bd_gain == BdGain::Frobenius ? link.frobenius_gain : link.mu_max_gain;
    }
  }
  throw PreconditionError("unknown scheme");
}

double interference_mark(Scheme scheme, const NetworkParams& p, const SimOptions& options,
                         CounterRng& rng) {
  if (options.marks == MarkModel::Surrogate) {
    return GammaSampler(mark_shape(scheme, p))(rng);
  }
  const CMatrix w = interferer_beamformers(scheme, p, rng);
  const int n_rx = scheme == Scheme::SisoBaseline ? 1 : p.N;
  const int n_tx = static_cast<int>(w.rows());
  const CMatrix cross = sample_channel(n_rx, n_tx, rng);
  const CVector u = random_unit_vector(n_rx, rng);
  const CRowVector filtered = u.adjoint() * cross;
  return (filtered * w).squaredNorm();
}

double sinr_value(double h0, double interference, const NetworkParams& params, double rho) {
  const double numerator = rho * h0 * std::pow(params.distance, -params.alpha);
  const double denominator = rho * interference + params.eta;
  if (denominator == 0.0) return numerator > 0.0 ? HUGE_VAL : 0.0;
  return numerator / denominator;
}

LinkSimulator::LinkSimulator(Scheme scheme, const NetworkParams& params,
                             const SimOptions& options)
    : scheme_(scheme),
      params_(params),
      options_(options),
      radius_(options.window_radius.value_or(
          default_window_radius(params.lambda, params.distance))),
      mean_count_(params.lambda * std::numbers::pi * radius_ * radius_),
      rho_eff_(options.power == PowerConvention::TotalSplit
                   ? params.rho / stream_count(scheme, params)
                   : params.rho),
      signal_path_(std::pow(params.distance, -params.alpha)),
      signal_sampler_(std::max(1, signal_law(scheme, params).dof)),
      mark_sampler_(mark_shape(scheme, params)),
      alpha_is_four_(params.alpha == 4.0) {
  validate(params);
  check_feasible(scheme, params);
  if (!(radius_ > 0.0)) throw DomainError("window radius must be > 0");
}

double LinkSimulator::draw_signal(CounterRng& rng) const {
  if (options_.signal == GainModel::Surrogate) {
    const SignalLaw law = signal_law(scheme_, params_);
    if (law.kind == SignalLawKind::MaxExponential) {
      double best = 0.0;
      for (int n = 0; n < law.dof; ++n) best = std::max(best, rng.exponential());
      return best;
    }
    return signal_sampler_(rng);
  }
  while (true) {
    const ChannelSet channels = sample_scheme_channels(scheme_, params_, rng);
    try {
      return signal_gain(scheme_, params_, channels, options_, rng);
    } catch (const RankDeficientError&) {
      // Probability-zero event: draw a fresh channel.
    }
  }
}

double LinkSimulator::draw_mark(CounterRng& rng) const {
  if (options_.marks == MarkModel::Surrogate) return mark_sampler_(rng);
  return interference_mark(scheme_, params_, options_, rng);
}

double LinkSimulator::path_gain(double r2) const {
  if (alpha_is_four_) return 1.0 / (r2 * r2);
  return std::pow(r2, -0.5 * params_.alpha);
}

double LinkSimulator::sinr(CounterRng& rng) const {
  const double h0 = draw_signal(rng);
  const auto count = rng.poisson(mean_count_);
  const double r2_max = radius_ * radius_;
  double interference = 0.0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const double r2 = r2_max * rng.uniform();
    interference += draw_mark(rng) * path_gain(r2);
  }
  return sinr_value(h0, interference, params_, rho_eff_);
}

bool LinkSimulator::success(CounterRng& rng) const {
  const double h0 = draw_signal(rng);
  if (params_.beta == 0.0) return true;
  // SINR >= beta  <=>  Y <= H0 D^{-alpha} / beta - eta / rho.
  const double budget = h0 * signal_path_ / params_.beta - params_.eta / rho_eff_;
  if (budget < 0.0) return false;
  const auto count = rng.poisson(mean_count_);
  const double r2_max = radius_ * radius_;
  double interference = 0.0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const double r2 = r2_max * rng.uniform();
    interference += draw_mark(rng) * path_gain(r2);
    if (interference > budget) return false;
  }
  return true;
}

double sinr_sample(Scheme scheme, const NetworkParams& params, const SimOptions& options,
                   CounterRng& rng) {
  return LinkSimulator(scheme, params, options).sinr(rng);
}

}  // namespace tcap::sim
