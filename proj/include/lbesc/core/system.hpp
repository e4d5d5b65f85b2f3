#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lbesc/core/dither.hpp"
#include "lbesc/core/objective.hpp"
#include "lbesc/errors.hpp"

namespace lbesc {

/// One coordinate of the multi-variable ESC
///   xdot_i = sqrt(omega_i) a_i (b1(f) u1(omega_i t) + b2(f) u2(omega_i t)),
/// with omega_i = frequency_scale * omega.
struct ChannelSpec {
  std::size_t index = 0;
  FieldElement b1 = FieldElement::affine(1.0);
  FieldElement b2 = FieldElement::constant(1.0);
  DitherSignal dither1 = DitherSignal::cosine();
  DitherSignal dither2 = DitherSignal::sine();
  double frequency_scale = 1.0;

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

enum class DerivativeMode { automatic, finite_difference };

/// b0(f) = b2(f) b1'(f) - b1(f) b2'(f).
///
/// Uses analytic derivatives when both elements provide them, otherwise a
/// central difference.
inline double b0_of(const ChannelSpec& channel, double f,
                    DerivativeMode mode = DerivativeMode::automatic) {
  const bool analytic = mode == DerivativeMode::automatic &&
                        channel.b1.has_derivative() && channel.b2.has_derivative();
  const double d1 = analytic ? channel.b1.derivative(f) : channel.b1.derivative_fd(f);
  const double d2 = analytic ? channel.b2.derivative(f) : channel.b2.derivative_fd(f);
  const double value = channel.b2(f) * d1 - channel.b1(f) * d2;
  if (!std::isfinite(value)) {
    throw EvaluationError("b0 is not finite", f);
  }
  return value;
}

/// Full description of an n-channel control-affine ESC run.
struct EscSystemSpec {
  ObjectiveMap objective;
  DomainBox domain;
  std::vector<ChannelSpec> channels;
  double omega = 1.0;  ///< rad/s
  Vector a0;           ///< initial amplitude per channel
  Vector lambda;       ///< adaptation gain per channel
  Vector x0;
  double horizon = 1.0;  ///< s
  double dt = 0.0;       ///< s

  std::size_t dimension() const { return channels.size(); }

  double max_frequency_scale() const {
    double s = 1.0;
    for (const auto& c : channels) {
      s = std::max(s, c.frequency_scale);
    }
    return s;
  }

  /// Shortest physical dither period over all channels, in seconds.
  double shortest_period() const {
    double best = 0.0;
    for (const auto& c : channels) {
      const double t1 = c.dither1.period() / (omega * c.frequency_scale);
      const double t2 = c.dither2.period() / (omega * c.frequency_scale);
      const double t = std::min(t1, t2);
      best = best == 0.0 ? t : std::min(best, t);
    }
    return best;
  }

  /// Period of the slowest channel: the common averaging window when the
  /// other channels run at integer multiples of it.
  double base_period() const {
    double best = 0.0;
    for (const auto& c : channels) {
      best = std::max(best, c.dither1.period() / (omega * c.frequency_scale));
    }
    return best;
  }

  std::size_t step_count() const {
    return static_cast<std::size_t>(std::llround(horizon / dt));
  }

  /// Number of integrator steps spanning base_period().
  std::size_t steps_per_period() const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(
                                        std::llround(base_period() / dt)));
  }
};

/// dt = (shortest dither period) / steps_per_period.
inline double default_dt(const EscSystemSpec& spec, double steps_per_period = 64.0) {
  return spec.shortest_period() / steps_per_period;
}

inline void validate(const EscSystemSpec& spec) {
  const auto n = static_cast<Eigen::Index>(spec.channels.size());
  if (n == 0) {
    throw ConfigError("system needs at least one channel");
  }
  if (spec.objective.dimension() != n) {
    throw ConfigError("objective dimension does not match channel count");
  }
  if (spec.a0.size() != n || spec.lambda.size() != n || spec.x0.size() != n) {
    throw ConfigError("a0, lambda and x0 must have one entry per channel");
  }
  if (spec.domain.dimension() != n) {
    throw ConfigError("domain box dimension does not match channel count");
  }
  for (std::size_t i = 0; i < spec.channels.size(); ++i) {
    const auto& c = spec.channels[i];
    if (c.index != i) {
      throw ConfigError("channel indices must be 0..n-1 in order");
    }
    if (!(c.frequency_scale > 0.0)) {
      throw ConfigError("channel frequency scale must be positive");
    }
    if (std::abs(c.dither1.period() - c.dither2.period()) >
        1e-12 * c.dither1.period()) {
      throw ConfigError("channel dither pair must share one period");
    }
  }
  if (!(spec.omega > 0.0)) {
    throw ConfigError("omega must be positive");
  }
  if (!((spec.lambda.array() > 0.0).all())) {
    throw ConfigError("lambda must be positive on every channel");
  }
  if (!((spec.a0.array() > 0.0).all())) {
    throw ConfigError("a0 must be positive on every channel");
  }
  if (!(spec.dt > 0.0)) {
    throw ConfigError("dt must be positive");
  }
  if (!(spec.horizon > spec.dt)) {
    throw ConfigError("horizon must exceed dt");
  }
  if (spec.dt > spec.shortest_period() / 32.0 * (1.0 + 1e-12)) {
    throw ConfigError("dt does not resolve the dither: need dt <= period/32");
  }
}

/// Synthetic estimation error eta(t) used to exercise the estimated LBS.
struct EstimationErrorModel {
  enum class Form { inverse_square, exponential };

  double eps0 = 0.1;     ///< sup |eta|
  double theta0 = 0.2;   ///< Lipschitz constant
  Form form = Form::inverse_square;
  double rate = 1.0;     ///< decay rate of the exponential form, 1/s

  static EstimationErrorModel inverse_square(double eps0) {
    return {eps0, 2.0 * eps0, Form::inverse_square, 1.0};
  }
  static EstimationErrorModel exponential(double eps0, double rate) {
    return {eps0, eps0 * rate, Form::exponential, rate};
  }

  double operator()(double t) const {
    const double tt = std::max(t, 0.0);
    switch (form) {
      case Form::inverse_square:
        return eps0 / ((1.0 + tt) * (1.0 + tt));
      case Form::exponential:
        return eps0 * std::exp(-rate * tt);
    }
    return 0.0;
  }
};

struct ErrorModelReport {
  bool bounded = false;
  bool lipschitz = false;
  bool decays = false;

  bool ok() const noexcept { return bounded && lipschitz && decays; }
};

/// Samples eta on [0, t_end] and checks |eta| <= eps0, the Lipschitz bound
/// on neighbouring samples, and |eta(t_end)| < 0.01 eps0.
inline ErrorModelReport verify_error_model(const EstimationErrorModel& m,
                                           double t_end = 100.0,
                                           std::size_t samples = 20000) {
  ErrorModelReport r{true, true, false};
  const double h = t_end / static_cast<double>(samples);
  double prev = m(0.0);
  for (std::size_t k = 0; k <= samples; ++k) {
    const double t = h * static_cast<double>(k);
    const double v = m(t);
    if (std::abs(v) > m.eps0 * (1.0 + 1e-12)) {
      r.bounded = false;
    }
    if (k > 0 && std::abs(v - prev) > m.theta0 * h * (1.0 + 1e-9)) {
      r.lipschitz = false;
    }
    prev = v;
  }
  r.decays = t_end >= 100.0 && std::abs(m(t_end)) < 0.01 * m.eps0;
  return r;
}

}  // namespace lbesc
