#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "lbesc/core/system.hpp"
#include "lbesc/gekf/gekf.hpp"
#include "lbesc/lie/lbs.hpp"
#include "lbesc/sim/rk4.hpp"
#include "lbesc/sim/trajectory.hpp"

namespace lbesc {

struct SimOptions {
  std::size_t log_every = 1;  ///< integrator steps between log samples
  bool reference = true;      ///< co-integrate the exact LBS when an oracle exists
  double noise_std = 0.0;     ///< Gaussian noise on the filter's measurements
  std::uint64_t seed = 0;
  /// Disables the filter and drives the adaptation law with J = value.
  std::optional<double> forced_j;
};

namespace detail {

/// Per-channel dither frequencies and input gains, resolved once per run.
struct InputModel {
  Vector omega;       ///< omega_i = scale_i * omega, rad/s
  Vector sqrt_omega;  ///< sqrt(omega_i)

  explicit InputModel(const EscSystemSpec& spec) {
    const auto n = static_cast<Eigen::Index>(spec.dimension());
    omega.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      omega[i] = spec.omega * spec.channels[static_cast<std::size_t>(i)].frequency_scale;
    }
    sqrt_omega = omega.array().sqrt().matrix();
  }

  /// Unit-amplitude inputs sqrt(omega_i) u_si(omega_i t) for s = 1, 2.
  void unit_inputs(const EscSystemSpec& spec, double t, Vector& u1, Vector& u2) const {
    const auto n = omega.size();
    u1.resize(n);
    u2.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& c = spec.channels[static_cast<std::size_t>(i)];
      const double theta = omega[i] * t;
      u1[i] = sqrt_omega[i] * c.dither1(theta);
      u2[i] = sqrt_omega[i] * c.dither2(theta);
    }
  }
};

/// xdot_i = sqrt(omega_i) a_i (b1_i(f) u1_i + b2_i(f) u2_i).
inline Vector esc_rhs(const EscSystemSpec& spec, const InputModel& inputs,
                      const Vector& a, double t, const Vector& x) {
  const double f = spec.objective.seek_value(x);
  const auto n = x.size();
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = spec.channels[static_cast<std::size_t>(i)];
    const double theta = inputs.omega[i] * t;
    out[i] = inputs.sqrt_omega[i] * a[i] *
             (c.b1(f) * c.dither1(theta) + c.b2(f) * c.dither2(theta));
  }
  return out;
}

inline void guard_divergence(const EscSystemSpec& spec, const Vector& x, double t) {
  const double limit = 10.0 * spec.domain.diagonal();
  if (!x.allFinite() || (x - spec.domain.center()).norm() > limit) {
    throw DivergenceError("state left 10x the domain box diagonal", t);
  }
}

inline TrajectoryLog make_log(const EscSystemSpec& spec, RunMode mode,
                              const SimOptions& opts) {
  TrajectoryLog log;
  log.mode = mode;
  log.dimension = spec.dimension();
  const std::size_t every = opts.log_every == 0 ? 1 : opts.log_every;
  log.stride = spec.dt * static_cast<double>(every);
  log.samples_per_period = std::max<std::size_t>(1, spec.steps_per_period() / every);
  log.samples.reserve(spec.step_count() / every + 2);
  return log;
}

inline bool wants_reference(const EscSystemSpec& spec, const SimOptions& opts) {
  return opts.reference && spec.objective.has_gradient();
}

}  // namespace detail

/// Constant-amplitude ESC with a = a0.
inline TrajectoryLog run_baseline(const EscSystemSpec& spec, const SimOptions& opts = {}) {
  validate(spec);
  const detail::InputModel inputs(spec);
  const Vector nu = nu_hats(spec);
  const bool reference = detail::wants_reference(spec, opts);
  const std::size_t every = opts.log_every == 0 ? 1 : opts.log_every;

  TrajectoryLog log = detail::make_log(spec, RunMode::baseline, opts);
  const Vector a = spec.a0;
  Vector x = spec.x0;
  Vector z = spec.x0;
  double t = 0.0;

  auto record = [&](double time) {
    TrajectorySample s;
    s.t = time;
    s.x = x;
    s.f = spec.objective(x);
    s.a = a;
    if (reference) {
      s.j_exact = lbs_rhs_exact(spec, x, a, nu).j;
      s.z_ref = z;
    }
    log.samples.push_back(std::move(s));
  };

  auto esc = [&](double tt, const Vector& xx) { return detail::esc_rhs(spec, inputs, a, tt, xx); };
  auto lbs = [&](double, const Vector& zz) { return lbs_rhs_exact(spec, zz, a, nu).j; };

  record(t);
  const std::size_t steps = spec.step_count();
  for (std::size_t k = 1; k <= steps; ++k) {
    x = rk4_step(esc, t, x, spec.dt);
    if (reference) {
      z = rk4_step(lbs, t, z, spec.dt);
    }
    t = spec.dt * static_cast<double>(k);
    detail::guard_divergence(spec, x, t);
    if (k % every == 0) {
      record(t);
    }
  }
  return log;
}

/// ESC with amplitude adaptation a' = -lambda (a - J), J estimated online by
/// the GEKF from objective measurements.
///
/// Within each step the amplitude is held at its value at the start of the
/// step; the adaptation law is advanced afterwards with J held.
inline TrajectoryLog run_proposed(const EscSystemSpec& spec, const GekfConfig& cfg,
                                  const SimOptions& opts = {}) {
  validate(spec);
  validate(cfg);
  const detail::InputModel inputs(spec);
  const Vector nu = nu_hats(spec);
  const bool reference = detail::wants_reference(spec, opts);
  const bool filtered = !opts.forced_j.has_value();
  const std::size_t every = opts.log_every == 0 ? 1 : opts.log_every;
  const auto n = static_cast<Eigen::Index>(spec.dimension());

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto measure = [&](const Vector& xx) {
    double y = spec.objective.seek_value(xx);
    if (opts.noise_std > 0.0) {
      y += opts.noise_std * gauss(rng);
    }
    return y;
  };

  const std::vector<ChannelModel> models = channel_models(spec, cfg, nu);
  TrajectoryLog log = detail::make_log(spec, RunMode::proposed, opts);

  Vector x = spec.x0;
  Vector z = spec.x0;
  Vector a = spec.a0;
  double t = 0.0;

  double f_prev_meas = measure(x);
  GekfState filter = GekfState::initial(spec.dimension(), cfg, f_prev_meas);
  EstimateHistory history(spec.steps_per_period());
  Vector J = filtered ? Vector::Zero(n) : Vector::Constant(n, *opts.forced_j);
  double innovation = 0.0;

  Vector U1 = Vector::Zero(n);
  Vector U2 = Vector::Zero(n);
  Vector u1_lo, u2_lo, u1_hi, u2_hi;
  inputs.unit_inputs(spec, t, u1_lo, u2_lo);

  auto record = [&](double time) {
    TrajectorySample s;
    s.t = time;
    s.x = x;
    s.f = spec.objective(x);
    s.a = a;
    s.j_est = J;
    if (reference) {
      s.j_exact = lbs_rhs_exact(spec, x, a, nu).j;
      s.z_ref = z;
    }
    if (filtered) {
      GekfDiagnostics d;
      d.x1 = filter.estimate();
      d.x2 = filter.rate();
      d.x3 = filter.held_objective();
      d.trace_p = filter.P.trace();
      d.min_eig_p = min_eigenvalue(filter.P);
      d.asymmetry_p = (filter.P - filter.P.transpose()).cwiseAbs().maxCoeff();
      d.innovation = innovation;
      s.gekf = std::move(d);
    }
    log.samples.push_back(std::move(s));
  };

  record(t);
  const std::size_t steps = spec.step_count();
  const std::size_t cadence = cfg.measurement_every;
  for (std::size_t k = 1; k <= steps; ++k) {
    const Vector a_held = a;
    auto esc = [&](double tt, const Vector& xx) {
      return detail::esc_rhs(spec, inputs, a_held, tt, xx);
    };
    x = rk4_step(esc, t, x, spec.dt);
    if (reference) {
      auto lbs = [&](double, const Vector& zz) { return lbs_rhs_exact(spec, zz, a_held, nu).j; };
      z = rk4_step(lbs, t, z, spec.dt);
    }

    const Vector J_held = J;
    auto law = [&](double, const Vector& aa) { return Vector(-spec.lambda.cwiseProduct(aa - J_held)); };
    a = rk4_step(law, t, a, spec.dt);

    const double t_next = spec.dt * static_cast<double>(k);
    detail::guard_divergence(spec, x, t_next);

    // Trapezoid integral of the inputs actually applied over this step.
    inputs.unit_inputs(spec, t_next, u1_hi, u2_hi);
    U1 += (0.5 * spec.dt) * a_held.cwiseProduct(u1_lo + u1_hi);
    U2 += (0.5 * spec.dt) * a_held.cwiseProduct(u2_lo + u2_hi);
    u1_lo.swap(u1_hi);
    u2_lo.swap(u2_hi);

    if (filtered) {
      filter = propagate(filter, cfg, spec.dt);
      if (k % cadence == 0) {
        const double f_meas = measure(x);
        UpdateResult upd =
            measurement_update(filter, cfg, f_meas, f_prev_meas, U1, U2, a_held, models);
        filter = std::move(upd.state);
        innovation = upd.innovation;
        f_prev_meas = f_meas;
        U1.setZero();
        U2.setZero();
      }
      history.push(filter.estimate());
      J = extract_J(filter, cfg, history).values;
    }

    t = t_next;
    if (k % every == 0) {
      record(t);
    }
  }
  return log;
}

/// Integrates the exact Lie bracket system, or the estimated one
///   z_i' = J_exact_i(z) - eta(t)
/// when an error model is given. Amplitudes stay at a0.
inline TrajectoryLog run_lbs(const EscSystemSpec& spec,
                             const std::optional<EstimationErrorModel>& err = std::nullopt,
                             const SimOptions& opts = {}) {
  validate(spec);
  if (!spec.objective.has_gradient()) {
    throw CapabilityError("run_lbs needs an oracle gradient");
  }
  const Vector nu = nu_hats(spec);
  const std::size_t every = opts.log_every == 0 ? 1 : opts.log_every;
  const Vector a = spec.a0;

  auto rhs = [&](double tt, const Vector& zz) {
    Vector d = lbs_rhs_exact(spec, zz, a, nu).j;
    if (err) {
      d.array() -= (*err)(tt);
    }
    return d;
  };

  TrajectoryLog log = detail::make_log(spec, RunMode::lbs, opts);
  Vector z = spec.x0;
  double t = 0.0;
  auto record = [&](double time) {
    TrajectorySample s;
    s.t = time;
    s.x = z;
    s.f = spec.objective(z);
    s.a = a;
    s.j_est = rhs(time, z);
    s.j_exact = lbs_rhs_exact(spec, z, a, nu).j;
    s.z_ref = z;
    log.samples.push_back(std::move(s));
  };

  record(t);
  const std::size_t steps = spec.step_count();
  for (std::size_t k = 1; k <= steps; ++k) {
    z = rk4_step(rhs, t, z, spec.dt);
    t = spec.dt * static_cast<double>(k);
    detail::guard_divergence(spec, z, t);
    if (k % every == 0) {
      record(t);
    }
  }
  return log;
}

}  // namespace lbesc
