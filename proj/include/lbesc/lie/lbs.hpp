#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lbesc/core/dither.hpp"
#include "lbesc/core/objective.hpp"
#include "lbesc/core/system.hpp"
#include "lbesc/errors.hpp"

namespace lbesc {

/// Unit-amplitude nu_{2i,1i} for every channel. Channels sharing a dither
/// pair reuse one quadrature.
inline Vector nu_hats(const EscSystemSpec& spec) {
  std::vector<std::pair<std::pair<DitherSignal, DitherSignal>, double>> cache;
  Vector out(static_cast<Eigen::Index>(spec.dimension()));
  for (std::size_t i = 0; i < spec.channels.size(); ++i) {
    const auto& c = spec.channels[i];
    double value = 0.0;
    bool found = false;
    for (const auto& [key, v] : cache) {
      if (key.first == c.dither2 && key.second == c.dither1) {
        value = v;
        found = true;
        break;
      }
    }
    if (!found) {
      value = nu_coefficient(c.dither2, c.dither1);
      cache.push_back({{c.dither2, c.dither1}, value});
    }
    out[static_cast<Eigen::Index>(i)] = value;
  }
  return out;
}

/// Right-hand side of the Lie bracket system with its ingredients kept for
/// diagnostics: J_i = -nu_i * df/dz_i * b0_i(f).
struct LbsRhs {
  Vector j;         ///< J_exact per channel
  Vector nu;        ///< amplitude-scaled nu_{2i,1i}
  Vector gradient;  ///< oracle gradient of the seek signal
  Vector b0;        ///< b0_i(f(z))
};

/// Exact LBS right-hand side at z for amplitudes a. Test oracle only: it
/// reads the analytic gradient.
inline LbsRhs lbs_rhs_exact(const EscSystemSpec& spec, const Vector& z,
                            const Vector& amplitude, const Vector& nu_hat) {
  if (!spec.objective.has_gradient()) {
    throw CapabilityError("lbs_rhs_exact needs an oracle gradient");
  }
  const auto n = static_cast<Eigen::Index>(spec.dimension());
  LbsRhs out;
  out.gradient = spec.objective.seek_gradient(z);
  const double f = spec.objective.seek_value(z);
  out.nu = (amplitude.array().square() * nu_hat.array()).matrix();
  out.b0.resize(n);
  out.j.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.b0[i] = b0_of(spec.channels[static_cast<std::size_t>(i)], f);
    out.j[i] = -out.nu[i] * out.gradient[i] * out.b0[i];
  }
  return out;
}

inline LbsRhs lbs_rhs_exact(const EscSystemSpec& spec, const Vector& z,
                            const Vector& amplitude) {
  return lbs_rhs_exact(spec, z, amplitude, nu_hats(spec));
}

inline LbsRhs lbs_rhs_exact(const EscSystemSpec& spec, const Vector& z) {
  return lbs_rhs_exact(spec, z, spec.a0);
}

}  // namespace lbesc
