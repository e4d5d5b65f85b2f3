#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "lbesc/analysis/bound_check.hpp"
#include "lbesc/errors.hpp"
#include "lbesc/sim/trajectory.hpp"

namespace lbesc {

/// Trailing moving average over `window` samples; the first window-1
/// outputs average what is available.
inline std::vector<double> moving_average(std::span<const double> v, std::size_t window) {
  std::vector<double> out(v.size());
  const std::size_t w = std::max<std::size_t>(1, window);
  double acc = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    acc += v[k];
    if (k >= w) acc -= v[k - w];
    out[k] = acc / static_cast<double>(std::min(k + 1, w));
  }
  return out;
}

struct RunMetrics {
  double final_error = 0.0;               ///< ||x(t_end) - x*||
  std::optional<double> settling_time;    ///< 5% band on the period average
  Vector envelope;                        ///< (max - min)/2 per coordinate, last window
  double envelope_max = 0.0;
  Vector final_amplitude;
};

/// Final error, settling time and last-window oscillation envelope.
///
/// Settling is the first time after which the period-averaged distance to
/// x* stays within 5% of the initial distance.
inline RunMetrics metrics(const TrajectoryLog& log, const Vector& x_star, double window) {
  if (log.empty()) {
    throw InputError("metrics: empty log");
  }
  if (x_star.size() != static_cast<Eigen::Index>(log.dimension)) {
    throw InputError("metrics: x* dimension does not match the log");
  }
  RunMetrics m;
  const auto n = static_cast<Eigen::Index>(log.dimension);
  m.final_error = (log.back().x - x_star).norm();
  m.final_amplitude = log.back().a;

  const double t_end = log.horizon();
  m.envelope = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& s : log.samples) {
      if (s.t < t_end - window) continue;
      if (first) {
        lo = hi = s.x[i];
        first = false;
      }
      lo = std::min(lo, s.x[i]);
      hi = std::max(hi, s.x[i]);
    }
    m.envelope[i] = 0.5 * (hi - lo);
  }
  m.envelope_max = m.envelope.maxCoeff();

  std::vector<std::vector<double>> averaged;
  for (Eigen::Index i = 0; i < n; ++i) {
    averaged.push_back(moving_average(log.state_series(i), log.samples_per_period));
  }
  const double band = 0.05 * (log.samples.front().x - x_star).norm();
  std::optional<std::size_t> entered;
  for (std::size_t k = 0; k < log.size(); ++k) {
    double d2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = averaged[static_cast<std::size_t>(i)][k] - x_star[i];
      d2 += d * d;
    }
    if (std::sqrt(d2) <= band) {
      if (!entered) entered = k;
    } else {
      entered.reset();
    }
  }
  if (entered) {
    m.settling_time = log.samples[*entered].t;
  }
  return m;
}

struct ComparisonReport {
  RunMetrics baseline;
  RunMetrics proposed;
  std::optional<double> envelope_ratio;  ///< proposed / baseline
  std::vector<BoundCheckResult> bound_check;
};

inline ComparisonReport compare(const TrajectoryLog& baseline, const TrajectoryLog& proposed,
                                const Vector& x_star, double window = 10.0, double p = 1.05,
                                double t_min = 1.0) {
  if (baseline.size() != proposed.size() ||
      std::abs(baseline.stride - proposed.stride) > 1e-12 * std::max(1.0, baseline.stride)) {
    throw InputError("compare: logs differ in stride or length");
  }
  ComparisonReport r;
  r.baseline = metrics(baseline, x_star, window);
  r.proposed = metrics(proposed, x_star, window);
  if (r.baseline.envelope_max > 1e-12) {
    r.envelope_ratio = r.proposed.envelope_max / r.baseline.envelope_max;
  }
  const bool has_j = !proposed.empty() && proposed.samples.front().j_est.has_value();
  if (has_j) {
    r.bound_check = check_bound(proposed, p, t_min, JSource::estimated);
  }
  return r;
}

/// Sup over the run of max_i |x_i - zref_i|.
inline double sup_deviation(const TrajectoryLog& log) {
  double worst = 0.0;
  for (const auto& s : log.samples) {
    if (!s.z_ref) {
      throw InputError("sup_deviation: log has no reference trajectory");
    }
    worst = std::max(worst, (s.x - *s.z_ref).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// How well the period-averaged estimate follows the period-averaged
/// oracle, and how the realised error eta = J_est - J_exact evolves.
struct EstimationQuality {
  Vector median_relative_error;  ///< over samples with t > t_from
  Vector eta_first_quarter;      ///< mean |eta| over the first quarter
  Vector eta_last_quarter;
  Vector eta_sup;
};

inline EstimationQuality estimation_quality(const TrajectoryLog& log, double t_from) {
  if (log.empty() || !log.samples.front().j_est || !log.samples.front().j_exact) {
    throw InputError("estimation_quality: log needs estimated and exact J");
  }
  const auto n = static_cast<Eigen::Index>(log.dimension);
  const std::size_t N = log.size();
  const std::size_t w = log.samples_per_period;
  EstimationQuality q;
  q.median_relative_error.resize(n);
  q.eta_first_quarter.resize(n);
  q.eta_last_quarter.resize(n);
  q.eta_sup.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> est(N), exact(N);
    for (std::size_t k = 0; k < N; ++k) {
      est[k] = (*log.samples[k].j_est)[i];
      exact[k] = (*log.samples[k].j_exact)[i];
    }
    const auto ea = moving_average(est, w);
    const auto xa = moving_average(exact, w);
    std::vector<double> rel;
    std::vector<double> eta(N);
    for (std::size_t k = 0; k < N; ++k) {
      eta[k] = std::abs(ea[k] - xa[k]);
      if (log.samples[k].t > t_from && k + 1 >= w) {
        rel.push_back(eta[k] / std::max(std::abs(xa[k]), 1e-300));
      }
    }
    if (rel.empty()) {
      q.median_relative_error[i] = std::numeric_limits<double>::quiet_NaN();
    } else {
      auto mid = rel.begin() + static_cast<std::ptrdiff_t>(rel.size() / 2);
      std::nth_element(rel.begin(), mid, rel.end());
      q.median_relative_error[i] = *mid;
    }
    const std::size_t quarter = std::max<std::size_t>(1, N / 4);
    double first = 0.0, last = 0.0;
    for (std::size_t k = 0; k < quarter; ++k) {
      first += eta[k];
      last += eta[N - 1 - k];
    }
    q.eta_first_quarter[i] = first / static_cast<double>(quarter);
    q.eta_last_quarter[i] = last / static_cast<double>(quarter);
    q.eta_sup[i] = *std::max_element(eta.begin(), eta.end());
  }
  return q;
}

namespace detail {
inline nlohmann::json vec_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}
}  // namespace detail

inline nlohmann::json to_json(const RunMetrics& m) {
  return {{"final_error", m.final_error},
          {"settling_time", m.settling_time ? nlohmann::json(*m.settling_time)
                                            : nlohmann::json(nullptr)},
          {"envelope", detail::vec_json(m.envelope)},
          {"envelope_max", m.envelope_max},
          {"final_amplitude", detail::vec_json(m.final_amplitude)}};
}

inline nlohmann::json to_json(const ComparisonReport& r) {
  nlohmann::json j;
  j["baseline"] = to_json(r.baseline);
  j["proposed"] = to_json(r.proposed);
  j["envelope_ratio"] =
      r.envelope_ratio ? nlohmann::json(*r.envelope_ratio) : nlohmann::json(nullptr);
  j["bound_check"] = r.bound_check.empty() ? nlohmann::json(nullptr) : to_json(r.bound_check);
  return j;
}

}  // namespace lbesc
