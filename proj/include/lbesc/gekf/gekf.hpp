#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "lbesc/core/objective.hpp"
#include "lbesc/core/system.hpp"
#include "lbesc/errors.hpp"

namespace lbesc {

/// Tuning of the LBS-estimating Kalman filter.
struct GekfConfig {
  double q1 = 1e-2;  ///< process noise density on the LBS estimate block
  double q2 = 1e-3;  ///< ... on its rate block
  double q3 = 1e-2;  ///< ... on the held objective value
  double r = 1e-2;   ///< measurement noise variance
  double p0 = 10.0;  ///< initial covariance scale, P = p0 * I
  /// Channels pause their update while |a_i| < a_floor_ratio * a0_i.
  double a_floor_ratio = 1e-3;
  /// Per-step decay of a paused channel's estimate.
  double floor_decay = 0.999;
  bool smoothing = true;  ///< export the one-period moving average
  std::size_t measurement_every = 1;  ///< integrator steps per measurement

  friend bool operator==(const GekfConfig&, const GekfConfig&) = default;
};

inline void validate(const GekfConfig& cfg) {
  if (!(cfg.q1 > 0.0 && cfg.q2 > 0.0 && cfg.q3 > 0.0 && cfg.r > 0.0 && cfg.p0 > 0.0)) {
    throw ConfigError("GEKF covariances must be positive");
  }
  if (!(cfg.a_floor_ratio > 0.0)) {
    throw ConfigError("GEKF amplitude floor must be positive");
  }
  if (!(cfg.floor_decay > 0.0 && cfg.floor_decay <= 1.0)) {
    throw ConfigError("GEKF floor decay must lie in (0, 1]");
  }
  if (cfg.measurement_every == 0) {
    throw ConfigError("GEKF measurement cadence must be >= 1 step");
  }
}

/// Filter state [x1; x2; x3] of size 2n + 1: the LBS right-hand side
/// estimate, its rate, and the held objective value.
struct GekfState {
  Vector mean;
  Matrix P;
  double t = 0.0;

  static GekfState initial(std::size_t n, const GekfConfig& cfg,
                           double first_measurement, double t0 = 0.0) {
    const auto m = static_cast<Eigen::Index>(2 * n + 1);
    GekfState s;
    s.mean = Vector::Zero(m);
    s.mean[m - 1] = first_measurement;
    s.P = cfg.p0 * Matrix::Identity(m, m);
    s.t = t0;
    return s;
  }

  std::size_t channels() const {
    return static_cast<std::size_t>((mean.size() - 1) / 2);
  }
  auto estimate() const { return mean.head(mean.size() / 2); }
  auto rate() const {
    const Eigen::Index n = mean.size() / 2;
    return mean.segment(n, n);
  }
  double held_objective() const { return mean[mean.size() - 1]; }
};

/// Smallest eigenvalue of the symmetric part of P.
inline double min_eigenvalue(const Matrix& P) {
  const Matrix sym = 0.5 * (P + P.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// Constant-rate prediction over dt: x1 += x2 dt, P <- Phi P Phi' + Q dt.
inline GekfState propagate(const GekfState& s, const GekfConfig& cfg, double dt) {
  if (!(dt > 0.0)) {
    throw ConfigError("GEKF propagate needs dt > 0");
  }
  const Eigen::Index m = s.mean.size();
  const Eigen::Index n = m / 2;

  GekfState out = s;
  out.mean.head(n) += dt * s.mean.segment(n, n);

  // Phi = [I dt*I 0; 0 I 0; 0 0 1]; expand Phi P Phi' blockwise.
  const Matrix& P = s.P;
  Matrix next = P;
  next.topRows(n) += dt * P.middleRows(n, n);
  next.leftCols(n) += dt * next.middleCols(n, n);
  next.diagonal().head(n).array() += cfg.q1 * dt;
  next.diagonal().segment(n, n).array() += cfg.q2 * dt;
  next(m - 1, m - 1) += cfg.q3 * dt;
  out.P = 0.5 * (next + next.transpose());
  out.t = s.t + dt;

  if (!out.mean.allFinite() || !out.P.allFinite()) {
    throw FilterDivergenceError("GEKF propagate produced a non-finite state", out.t);
  }
  return out;
}

/// Per-channel data the measurement model needs besides the state.
struct ChannelModel {
  ChannelSpec spec;
  double nu_hat = 0.5;   ///< unit-amplitude nu_{2i,1i}
  double a_floor = 0.0;  ///< amplitude below which the channel pauses
};

inline std::vector<ChannelModel> channel_models(const EscSystemSpec& spec,
                                                const GekfConfig& cfg,
                                                const Vector& nu_hat) {
  std::vector<ChannelModel> out;
  out.reserve(spec.dimension());
  for (std::size_t i = 0; i < spec.dimension(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out.push_back({spec.channels[i], nu_hat[k], cfg.a_floor_ratio * std::abs(spec.a0[k])});
  }
  return out;
}

enum class ChannelStatus { updated, singular_geometry, below_floor };

struct UpdateResult {
  GekfState state;
  double innovation = 0.0;
  Vector regressor;  ///< measurement row on the x1 block
  std::vector<ChannelStatus> status;
};

/// Scalar Kalman update against the first-order Chen-Fliess increment.
///
/// With the estimate x1_i = -nu_i a_i^2 b0_i df/dx_i, the increment
/// sum_i df/dx_i (b1_i U1_i + b2_i U2_i) is linear in x1:
///   y_hat = x3 + sum_i c_i x1_i,
///   c_i = -(b1_i(f1) U1_i + b2_i(f1) U2_i) / (nu_i a_i^2 b0_i(f1)).
/// The coefficients use the measured objective at t1. After the update the
/// held objective x3 is replaced by the new measurement.
inline UpdateResult measurement_update(const GekfState& s, const GekfConfig& cfg,
                                       double f_meas_t2, double f_meas_t1,
                                       const Vector& U1, const Vector& U2,
                                       const Vector& a,
                                       std::span<const ChannelModel> channels) {
  const Eigen::Index m = s.mean.size();
  const Eigen::Index n = m / 2;
  if (static_cast<Eigen::Index>(channels.size()) != n || U1.size() != n ||
      U2.size() != n || a.size() != n) {
    throw ConfigError("GEKF measurement_update: dimension mismatch");
  }

  UpdateResult out;
  out.state = s;
  out.regressor = Vector::Zero(n);
  out.status.assign(static_cast<std::size_t>(n), ChannelStatus::updated);

  Eigen::RowVectorXd H = Eigen::RowVectorXd::Zero(m);
  H[m - 1] = 1.0;
  bool any = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& ch = channels[static_cast<std::size_t>(i)];
    if (std::abs(a[i]) < ch.a_floor) {
      out.status[static_cast<std::size_t>(i)] = ChannelStatus::below_floor;
      out.state.mean[i] *= cfg.floor_decay;
      out.state.mean[n + i] = 0.0;
      continue;
    }
    const double b0 = b0_of(ch.spec, f_meas_t1);
    if (std::abs(b0) < 1e-12) {
      out.status[static_cast<std::size_t>(i)] = ChannelStatus::singular_geometry;
      continue;
    }
    const double drive = ch.spec.b1(f_meas_t1) * U1[i] + ch.spec.b2(f_meas_t1) * U2[i];
    H[i] = -drive / (ch.nu_hat * a[i] * a[i] * b0);
    out.regressor[i] = H[i];
    any = true;
  }

  if (any) {
    const Vector& x = out.state.mean;
    const Matrix& P = out.state.P;
    const double predicted = (H * x).value();
    out.innovation = f_meas_t2 - predicted;
    const Vector PHt = P * H.transpose();
    const double S = (H * PHt).value() + cfg.r;
    const Vector K = PHt / S;
    out.state.mean = x + K * out.innovation;
    const Matrix IKH = Matrix::Identity(m, m) - K * H;
    Matrix joseph = IKH * P * IKH.transpose() + cfg.r * (K * K.transpose());
    out.state.P = 0.5 * (joseph + joseph.transpose());
  } else {
    out.innovation = f_meas_t2 - out.state.mean[m - 1];
  }
  out.state.mean[m - 1] = f_meas_t2;

  if (!out.state.mean.allFinite() || !out.state.P.allFinite()) {
    throw FilterDivergenceError("GEKF update produced a non-finite state", s.t);
  }
  return out;
}

/// Sliding window over the last `window` estimates of x1.
class EstimateHistory {
 public:
  explicit EstimateHistory(std::size_t window) : window_(window == 0 ? 1 : window) {}

  void push(const Vector& x1) {
    if (samples_.empty()) {
      sum_ = Vector::Zero(x1.size());
    }
    samples_.push_back(x1);
    sum_ += x1;
    if (samples_.size() > window_) {
      sum_ -= samples_.front();
      samples_.pop_front();
    }
    // Re-sum periodically so the running sum does not accumulate drift.
    if (++pushes_ % (16 * window_) == 0) {
      sum_.setZero();
      for (const auto& v : samples_) {
        sum_ += v;
      }
    }
  }

  bool empty() const noexcept { return samples_.empty(); }
  std::size_t size() const noexcept { return samples_.size(); }
  std::size_t window() const noexcept { return window_; }
  Vector mean() const { return sum_ / static_cast<double>(samples_.size()); }

 private:
  std::size_t window_;
  std::deque<Vector> samples_;
  Vector sum_;
  std::size_t pushes_ = 0;
};

/// The filter's exported estimate of the LBS right-hand side.
struct JSignal {
  Vector values;
  double t = 0.0;
};

/// J = one-period moving average of x1 when smoothing is on, else x1.
inline JSignal extract_J(const GekfState& s, const GekfConfig& cfg,
                         const EstimateHistory& history) {
  if (!cfg.smoothing || history.empty()) {
    return {Vector(s.estimate()), s.t};
  }
  return {history.mean(), s.t};
}

}  // namespace lbesc
