#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lbesc/core/objective.hpp"

namespace lbesc {

/// Filter internals recorded alongside a proposed-ESC sample.
struct GekfDiagnostics {
  Vector x1;
  Vector x2;
  double x3 = 0.0;
  double trace_p = 0.0;
  double min_eig_p = 0.0;
  double asymmetry_p = 0.0;  ///< max |P - P'|
  double innovation = 0.0;
};

struct TrajectorySample {
  double t = 0.0;
  Vector x;
  double f = 0.0;  ///< raw objective value
  Vector a;
  std::optional<Vector> j_est;
  std::optional<Vector> j_exact;
  std::optional<Vector> z_ref;
  std::optional<GekfDiagnostics> gekf;
};

enum class RunMode { baseline, proposed, lbs };

inline std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::baseline:
      return "baseline";
    case RunMode::proposed:
      return "proposed";
    case RunMode::lbs:
      return "lbs";
  }
  return "unknown";
}

/// Uniformly sampled run record.
struct TrajectoryLog {
  RunMode mode = RunMode::baseline;
  std::size_t dimension = 0;
  double stride = 0.0;  ///< seconds between samples
  /// Samples spanning one dither period of the slowest channel; 1 when
  /// unknown (e.g. a log read back from CSV without scenario context).
  std::size_t samples_per_period = 1;
  std::vector<TrajectorySample> samples;

  bool empty() const noexcept { return samples.empty(); }
  std::size_t size() const noexcept { return samples.size(); }
  const TrajectorySample& back() const { return samples.back(); }
  double horizon() const { return samples.empty() ? 0.0 : samples.back().t; }

  std::vector<double> times() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.t);
    return out;
  }

  /// Coordinate k of x over the whole log.
  std::vector<double> state_series(Eigen::Index k) const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.x[k]);
    return out;
  }
};

}  // namespace lbesc
