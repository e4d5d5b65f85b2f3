#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lbesc::quadrature {

/// Composite Simpson rule on `intervals` (even) equal panels of [lo, hi].
template <typename Fn>
double simpson(Fn&& fn, double lo, double hi, std::size_t intervals) {
  if (intervals < 2 || intervals % 2 != 0) {
    throw std::invalid_argument("simpson: interval count must be even and >= 2");
  }
  const double h = (hi - lo) / static_cast<double>(intervals);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t k = 1; k < intervals; ++k) {
    const double v = fn(lo + h * static_cast<double>(k));
    if (k % 2 == 1) {
      odd += v;
    } else {
      even += v;
    }
  }
  return h / 3.0 * (fn(lo) + fn(hi) + 4.0 * odd + 2.0 * even);
}

/// Simpson rule over uniformly spaced samples (size odd, >= 3).
inline double simpson_samples(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  if (n < 3 || n % 2 == 0) {
    throw std::invalid_argument("simpson_samples: need an odd sample count >= 3");
  }
  double acc = v.front() + v.back();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    acc += (k % 2 == 1 ? 4.0 : 2.0) * v[k];
  }
  return acc * h / 3.0;
}

/// Running integral I[k] = int_{x0}^{xk} of uniformly spaced samples.
///
/// Even nodes accumulate whole Simpson panels; odd nodes add the
/// three-point half-panel rule h/12 (5 v0 + 8 v1 - v2). Both are exact for
/// quadratics inside a panel, so the error is O(h^4) for smooth data.
inline std::vector<double> cumulative_simpson(const std::vector<double>& v,
                                              double h) {
  const std::size_t n = v.size();
  if (n < 3 || n % 2 == 0) {
    throw std::invalid_argument("cumulative_simpson: need an odd sample count >= 3");
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k + 2 < n; k += 2) {
    out[k + 1] = out[k] + h / 12.0 * (5.0 * v[k] + 8.0 * v[k + 1] - v[k + 2]);
    out[k + 2] = out[k] + h / 3.0 * (v[k] + 4.0 * v[k + 1] + v[k + 2]);
  }
  return out;
}

}  // namespace lbesc::quadrature
