#pragma once

#include <cmath>
#include <span>

#include "lbesc/core/objective.hpp"
#include "lbesc/core/system.hpp"
#include "lbesc/errors.hpp"

namespace lbesc {

/// First-order Chen-Fliess prediction of the objective after one interval:
///
///   f(t2) ~ f(t1) + sum_i df/dx_i (b1_i(f1) U1_i + b2_i(f1) U2_i)
///
/// where U_si is the integral of the actual input u_si over [t1, t2].
inline double chen_fliess_predict(double f_t1, const Vector& grad_t1,
                                  std::span<const ChannelSpec> channels,
                                  const Vector& U1, const Vector& U2) {
  const auto n = static_cast<Eigen::Index>(channels.size());
  if (grad_t1.size() != n || U1.size() != n || U2.size() != n) {
    throw ConfigError("chen_fliess_predict: dimension mismatch");
  }
  double out = f_t1;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = channels[static_cast<std::size_t>(i)];
    out += grad_t1[i] * (c.b1(f_t1) * U1[i] + c.b2(f_t1) * U2[i]);
  }
  if (!std::isfinite(out)) {
    throw EvaluationError("chen_fliess_predict produced a non-finite value", f_t1);
  }
  return out;
}

}  // namespace lbesc
