#pragma once

#include <Eigen/Core>

#include <cmath>

#include "lbesc/errors.hpp"

namespace lbesc {

namespace detail {
inline bool all_finite(double v) { return std::isfinite(v); }
template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}
}  // namespace detail

/// One classical fourth-order Runge-Kutta step of x' = rhs(t, x).
///
/// State may be a double or any Eigen vector. Throws IntegrationError naming
/// the first stage whose slope is not finite.
template <typename State, typename Rhs>
State rk4_step(Rhs&& rhs, double t, const State& x, double dt) {
  if (!(dt > 0.0)) {
    throw IntegrationError("rk4_step needs dt > 0", t, 0);
  }
  const double half = 0.5 * dt;

  const State k1 = rhs(t, x);
  if (!detail::all_finite(k1)) throw IntegrationError("non-finite slope", t, 1);
  const State k2 = rhs(t + half, State(x + half * k1));
  if (!detail::all_finite(k2)) throw IntegrationError("non-finite slope", t + half, 2);
  const State k3 = rhs(t + half, State(x + half * k2));
  if (!detail::all_finite(k3)) throw IntegrationError("non-finite slope", t + half, 3);
  const State k4 = rhs(t + dt, State(x + dt * k3));
  if (!detail::all_finite(k4)) throw IntegrationError("non-finite slope", t + dt, 4);

  return State(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace lbesc
