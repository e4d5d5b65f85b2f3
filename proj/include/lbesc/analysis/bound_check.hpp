#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "lbesc/errors.hpp"
#include "lbesc/sim/trajectory.hpp"

namespace lbesc {

/// Outcome of checking |J(t)| <= 1/t^p on one channel.
struct BoundCheckResult {
  bool holds = false;
  /// Earliest sample time >= t_min after which every sample satisfies the
  /// bound; empty when the last sample still violates it.
  std::optional<double> t_star;
  double p = 0.0;
  double t_min = 0.0;
  std::size_t violations_after_t_star = 0;
  std::size_t violations_total = 0;  ///< violations at t >= t_min
  std::optional<double> last_violation;
};

/// Scans the series for the tail on which |J| stays under 1/t^p.
inline BoundCheckResult check_bound(std::span<const double> t, std::span<const double> J,
                                    double p, double t_min = 1.0) {
  if (t.empty() || J.empty()) {
    throw InputError("check_bound: empty series");
  }
  if (t.size() != J.size()) {
    throw InputError("check_bound: time and value series differ in length");
  }
  if (!(p > 1.0)) {
    throw InputError("check_bound: p must exceed 1");
  }
  if (!(t_min > 0.0)) {
    throw InputError("check_bound: t_min must be positive");
  }
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (!(t[k] > t[k - 1])) {
      throw InputError("check_bound: times must be strictly increasing");
    }
  }

  BoundCheckResult r;
  r.p = p;
  r.t_min = t_min;
  std::optional<std::size_t> first_eligible;
  std::optional<std::size_t> last_bad;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_min) continue;
    if (!first_eligible) first_eligible = k;
    const double bound = std::pow(t[k], -p);
    if (!(std::abs(J[k]) <= bound)) {
      last_bad = k;
      ++r.violations_total;
    }
  }
  if (!first_eligible) {
    return r;  // nothing at or after t_min
  }
  if (last_bad) {
    r.last_violation = t[*last_bad];
    if (*last_bad + 1 < t.size()) {
      r.t_star = t[*last_bad + 1];
    }
  } else {
    r.t_star = t[*first_eligible];
  }
  r.holds = r.t_star.has_value();
  return r;
}

enum class JSource { estimated, exact };

/// Per-channel bound check on a trajectory log.
inline std::vector<BoundCheckResult> check_bound(const TrajectoryLog& log, double p,
                                                 double t_min = 1.0,
                                                 JSource source = JSource::estimated) {
  if (log.empty()) {
    throw InputError("check_bound: empty log");
  }
  const std::vector<double> t = log.times();
  std::vector<BoundCheckResult> out;
  for (std::size_t i = 0; i < log.dimension; ++i) {
    std::vector<double> J;
    J.reserve(log.size());
    for (const auto& s : log.samples) {
      const auto& v = source == JSource::estimated ? s.j_est : s.j_exact;
      if (!v) {
        throw InputError("check_bound: log has no J column for the requested source");
      }
      J.push_back((*v)[static_cast<Eigen::Index>(i)]);
    }
    out.push_back(check_bound(t, J, p, t_min));
  }
  return out;
}

inline bool all_hold(const std::vector<BoundCheckResult>& results) {
  for (const auto& r : results) {
    if (!r.holds) return false;
  }
  return !results.empty();
}

inline nlohmann::json to_json(const BoundCheckResult& r) {
  nlohmann::json j;
  j["holds"] = r.holds;
  j["t_star"] = r.t_star ? nlohmann::json(*r.t_star) : nlohmann::json(nullptr);
  j["p"] = r.p;
  j["t_min"] = r.t_min;
  j["violations_after_t_star"] = r.violations_after_t_star;
  j["violations_total"] = r.violations_total;
  j["last_violation"] =
      r.last_violation ? nlohmann::json(*r.last_violation) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const std::vector<BoundCheckResult>& rs) {
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& r : rs) channels.push_back(to_json(r));
  return {{"holds", all_hold(rs)}, {"channels", channels}};
}

}  // namespace lbesc
