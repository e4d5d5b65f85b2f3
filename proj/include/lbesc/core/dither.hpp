#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "lbesc/core/quadrature.hpp"
#include "lbesc/errors.hpp"

namespace lbesc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Quadrature panels per dither period used by the checks below.
inline constexpr std::size_t kDitherQuadratureNodes = 4096;

enum class DitherKind { cosine, sine, tabulated };

struct DitherSample {
  double theta;
  double value;

  friend bool operator==(const DitherSample&, const DitherSample&) = default;
};

/// A T-periodic, zero-mean, bounded probing waveform u(theta).
///
/// The ESC evaluates it at theta = omega * t. Cosine and sine variants are
/// scaled so that one period of theta spans `period`; with the default
/// period 2*pi they reduce to cos(theta + phase) and sin(theta + phase).
/// Tabulated waveforms interpolate linearly between samples and wrap from
/// the last sample back to the first one period later.
class DitherSignal {
 public:
  static DitherSignal cosine(double phase = 0.0, double period = kTwoPi,
                             double bound = 1.0) {
    return DitherSignal(DitherKind::cosine, phase, period, bound, {});
  }

  static DitherSignal sine(double phase = 0.0, double period = kTwoPi,
                           double bound = 1.0) {
    return DitherSignal(DitherKind::sine, phase, period, bound, {});
  }

  /// Samples must have distinct theta in [0, period); they are sorted here.
  static DitherSignal tabulated(std::vector<DitherSample> samples,
                                double period = kTwoPi, double bound = 1.0) {
    if (samples.empty()) {
      throw ConfigError("tabulated dither needs at least one sample");
    }
    std::sort(samples.begin(), samples.end(),
              [](const DitherSample& l, const DitherSample& r) {
                return l.theta < r.theta;
              });
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double th = samples[k].theta;
      if (!(th >= 0.0 && th < period) || !std::isfinite(samples[k].value)) {
        throw ConfigError("tabulated dither sample outside [0, T) or non-finite");
      }
      if (k > 0 && th == samples[k - 1].theta) {
        throw ConfigError("tabulated dither has duplicate sample angles");
      }
    }
    return DitherSignal(DitherKind::tabulated, 0.0, period, bound,
                        std::move(samples));
  }

  /// Uniform grid of `values` over [0, period).
  static DitherSignal tabulated_uniform(const std::vector<double>& values,
                                        double period = kTwoPi,
                                        double bound = 1.0) {
    std::vector<DitherSample> samples;
    samples.reserve(values.size());
    const double h = period / static_cast<double>(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
      samples.push_back({h * static_cast<double>(k), values[k]});
    }
    return tabulated(std::move(samples), period, bound);
  }

  DitherKind kind() const noexcept { return kind_; }
  double phase() const noexcept { return phase_; }
  double period() const noexcept { return period_; }
  double bound() const noexcept { return bound_; }
  const std::vector<DitherSample>& samples() const noexcept { return samples_; }

  double operator()(double theta) const {
    switch (kind_) {
      case DitherKind::cosine:
        return std::cos(theta * (kTwoPi / period_) + phase_);
      case DitherKind::sine:
        return std::sin(theta * (kTwoPi / period_) + phase_);
      case DitherKind::tabulated:
        return interpolate(theta);
    }
    return 0.0;
  }

  friend bool operator==(const DitherSignal&, const DitherSignal&) = default;

 private:
  DitherSignal(DitherKind kind, double phase, double period, double bound,
               std::vector<DitherSample> samples)
      : kind_(kind),
        phase_(phase),
        period_(period),
        bound_(bound),
        samples_(std::move(samples)) {
    if (!(period_ > 0.0) || !std::isfinite(period_)) {
      throw ConfigError("dither period must be positive and finite");
    }
    if (!(bound_ > 0.0)) {
      throw ConfigError("dither bound must be positive");
    }
  }

  double interpolate(double theta) const {
    if (samples_.empty()) {
      throw ConfigError("tabulated dither has no samples");
    }
    if (samples_.size() == 1) {
      return samples_.front().value;
    }
    double th = std::fmod(theta, period_);
    if (th < 0.0) {
      th += period_;
    }
    auto hi = std::upper_bound(
        samples_.begin(), samples_.end(), th,
        [](double v, const DitherSample& s) { return v < s.theta; });
    const DitherSample& left = hi == samples_.begin() ? samples_.back() : *(hi - 1);
    const DitherSample& right = hi == samples_.end() ? samples_.front() : *hi;
    double t_left = left.theta;
    double t_right = right.theta;
    if (hi == samples_.begin()) {
      t_left -= period_;
    }
    if (hi == samples_.end()) {
      t_right += period_;
    }
    const double w = (th - t_left) / (t_right - t_left);
    return left.value + w * (right.value - left.value);
  }

  DitherKind kind_;
  double phase_;
  double period_;
  double bound_;
  std::vector<DitherSample> samples_;
};

/// Evaluates d at theta. |result| <= d.bound() whenever d passes the A2
/// bound check.
inline double eval_dither(const DitherSignal& d, double theta) { return d(theta); }

struct A2Report {
  bool periodic = false;
  bool zero_mean = false;
  bool bounded = false;
  double mean = 0.0;  ///< (1/T) int_0^T u
  double sup = 0.0;   ///< max |u| over the sampled points

  bool ok() const noexcept { return periodic && zero_mean && bounded; }
};

/// Checks periodicity, zero average and the declared sup bound of a dither
/// on `nodes` points per period.
inline A2Report verify_assumption_a2(const DitherSignal& d,
                                     std::size_t nodes = kDitherQuadratureNodes) {
  A2Report report;
  const double period = d.period();
  const double h = period / static_cast<double>(nodes);

  bool periodic = true;
  double sup = 0.0;
  std::vector<double> grid(nodes + 1);
  for (std::size_t k = 0; k <= nodes; ++k) {
    const double th = h * static_cast<double>(k);
    grid[k] = d(th);
    sup = std::max(sup, std::abs(grid[k]));
    if (k < nodes) {
      const double shifted = d(th + period);
      const double scale = std::max(1.0, std::abs(grid[k]));
      if (std::abs(shifted - grid[k]) > 1e-12 * scale) {
        periodic = false;
      }
    }
  }
  for (const auto& s : d.samples()) {
    sup = std::max(sup, std::abs(s.value));
  }

  const double integral = quadrature::simpson_samples(grid, h);
  report.periodic = periodic;
  report.mean = integral / period;
  report.zero_mean = std::abs(integral) <= 1e-9 * period;
  report.sup = sup;
  report.bounded = sup <= d.bound();
  return report;
}

/// Unit-amplitude averaging weight
///   nu_{j,i} = (1/T) int_0^T u_j(theta) int_0^theta u_i(tau) dtau dtheta.
///
/// The physical coefficient multiplying a Lie bracket is a_j * a_i times
/// this value.
inline double nu_coefficient(const DitherSignal& u_j, const DitherSignal& u_i,
                             std::size_t nodes = kDitherQuadratureNodes) {
  const double period = u_j.period();
  if (std::abs(period - u_i.period()) > 1e-12 * period) {
    throw ConfigError("nu_coefficient: dithers have different periods");
  }
  if (nodes < 2 || nodes % 2 != 0) {
    throw ConfigError("nu_coefficient: node count must be even");
  }
  for (const DitherSignal* d : {&u_j, &u_i}) {
    const A2Report r = verify_assumption_a2(*d, nodes);
    if (!r.periodic || !r.zero_mean) {
      throw ConfigError("nu_coefficient: dither is not a zero-mean periodic signal");
    }
  }

  const double h = period / static_cast<double>(nodes);
  std::vector<double> inner(nodes + 1);
  std::vector<double> outer(nodes + 1);
  for (std::size_t k = 0; k <= nodes; ++k) {
    inner[k] = u_i(h * static_cast<double>(k));
  }
  const std::vector<double> running = quadrature::cumulative_simpson(inner, h);
  for (std::size_t k = 0; k <= nodes; ++k) {
    outer[k] = u_j(h * static_cast<double>(k)) * running[k];
  }
  return quadrature::simpson_samples(outer, h) / period;
}

}  // namespace lbesc
