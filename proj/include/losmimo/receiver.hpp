#pragma once

#include "losmimo/channel.hpp"
#include "losmimo/metrics.hpp"
#include "losmimo/modem.hpp"
#include "losmimo/numerics.hpp"
#include "losmimo/phasenoise.hpp"

#include <cmath>

namespace losmimo {

/// Least-squares estimate Y_t X_t^H / L_t for orthogonal training (X_t X_t^H = L_t I).
inline CMatrix estimate_channel(const CMatrix& y_t, const CMatrix& x_t) {
  if (y_t.cols() != x_t.cols() || x_t.cols() == 0)
    throw std::invalid_argument("estimate_channel: training length mismatch");
  const double len = static_cast<double>(x_t.cols());
  const CMatrix gram = x_t * x_t.adjoint();
  const CMatrix target = CMatrix::Identity(x_t.rows(), x_t.rows()) * len;
  if ((gram - target).norm() > 1e-9 * len * static_cast<double>(x_t.rows()))
    throw std::invalid_argument("estimate_channel: training sequence is not orthogonal");
  return y_t * x_t.adjoint() / len;
}

/// x_hat = pinv(H_hat) y for one vector or a block of columns.
inline CMatrix zf_equalize(const CMatrix& h_hat, const CMatrix& y) { return pinv(h_hat) * y; }

enum class TrackerMode { per_stream, averaged };

/// First-order decision-directed phase tracker, one state per stream.
struct PnTracker {
  double alpha = 0.1;
  RVector theta_hat;
  TrackerMode mode = TrackerMode::per_stream;

  PnTracker() = default;
  PnTracker(int n, double a, TrackerMode m) : alpha(a), theta_hat(RVector::Zero(n)), mode(m) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("PnTracker: alpha must lie in [0, 1]");
  }
};

struct TrackStep {
  CVector compensated;  // x_hat(k)
  Eigen::VectorXi decisions;  // indices of x_bar(k)
};

/// Rotates stream i by exp(-j theta_hat_i), detects, then advances the state
/// with alpha * arg(x_hat_i x_bar_i^*) for use on the next symbol.
inline TrackStep track_and_compensate(PnTracker& tracker, const CVector& x_raw, const Constellation& c) {
  const Eigen::Index n = x_raw.size();
  if (tracker.theta_hat.size() != n) throw std::invalid_argument("track_and_compensate: stream count mismatch");
  TrackStep step{CVector(n), Eigen::VectorXi(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx z = x_raw[i] * std::polar(1.0, -tracker.theta_hat[i]);
    const int d = nearest_point(c, z);
    step.compensated[i] = z;
    step.decisions[i] = d;
    tracker.theta_hat[i] += tracker.alpha * std::arg(z * std::conj(c.points[static_cast<std::size_t>(d)]));
  }
  if (tracker.mode == TrackerMode::averaged) tracker.theta_hat.setConstant(tracker.theta_hat.mean());
  return step;
}

struct RxConfig {
  bool compensation = false;
  double alpha = 0.1;
  TrackerMode tracker_mode = TrackerMode::per_stream;
  bool perfect_csi = false;
  // When false the training prefix reaches the estimator through channel and
  // phase noise but without additive noise.
  bool training_noise = false;
};

/// Noise-free received block Theta_Rx(k) H Theta_Tx(k) x(k) for columns [first, first + count).
inline CMatrix propagate(const CMatrix& h, const PhaseBank& bank, const CMatrix& x, Eigen::Index first,
                         Eigen::Index count) {
  CMatrix y(h.rows(), count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const Eigen::Index t = first + k;
    const CVector tx = phase_rotors(bank.tx, t).cwiseProduct(x.col(t));
    y.col(k) = phase_rotors(bank.rx, t).cwiseProduct(h * tx);
  }
  return y;
}

/// One frame through the full chain. Phase trajectories are indexed from the
/// frame start, so each frame begins phase-synchronized; the tracker is reset.
inline TrialResult run_frame(const ChannelMatrix& channel, const PhaseBank& bank, const Frame& frame,
                             const Constellation& c, double noise_var, const RxConfig& cfg, RandomSource& noise_rs) {
  const int n = frame.n;
  const Eigen::Index lt = frame.training_len;
  const Eigen::Index ld = frame.data_len;
  const Eigen::Index lf = frame.frame_len();
  if (channel.size() != n || bank.tx.rows() != n || bank.rx.rows() != n || bank.tx.cols() < lf ||
      bank.rx.cols() < lf)
    throw std::invalid_argument("run_frame: inconsistent dimensions");

  const CMatrix clean = propagate(channel.h, bank, frame.symbols, 0, lf);
  CMatrix noise(n, lf);
  for (Eigen::Index k = 0; k < lf; ++k) noise.col(k) = sample_cgauss(noise_rs, n, noise_var);
  const CMatrix received = clean + noise;

  CMatrix h_hat;
  if (cfg.perfect_csi) {
    h_hat = channel.h;
  } else {
    const CMatrix y_t = cfg.training_noise ? CMatrix(received.leftCols(lt)) : CMatrix(clean.leftCols(lt));
    h_hat = estimate_channel(y_t, frame.training());
  }

  const CMatrix x_raw = zf_equalize(h_hat, received.rightCols(ld));

  TrialResult acc;
  PnTracker tracker(n, cfg.alpha, cfg.tracker_mode);
  for (Eigen::Index k = 0; k < ld; ++k) {
    const auto x = frame.symbols.col(lt + k);
    CVector x_hat;
    if (cfg.compensation) {
      TrackStep step = track_and_compensate(tracker, x_raw.col(k), c);
      for (int i = 0; i < n; ++i)
        if (step.decisions[i] != frame.data_indices(i, k)) ++acc.symbol_errors;
      x_hat = std::move(step.compensated);
    } else {
      x_hat = x_raw.col(k);
      for (int i = 0; i < n; ++i)
        if (nearest_point(c, x_hat[i]) != frame.data_indices(i, k)) ++acc.symbol_errors;
    }
    acc.err_energy += (x - x_hat).squaredNorm();
    acc.ref_energy += x.squaredNorm();
  }
  acc.symbols = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(ld);
  if (acc.ref_energy > 0.0) {
    acc.frames = 1;
    acc.frame_evm_sum = std::sqrt(acc.err_energy / acc.ref_energy);
  }
  return acc;
}

}  // namespace losmimo
