#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "lbesc/core/objective.hpp"
#include "lbesc/core/system.hpp"
#include "lbesc/errors.hpp"

namespace lbesc {

/// One vector-field element b_si of a channel, as a function of the
/// shifted objective.
struct B2Element {
  std::string label;  ///< e.g. "b_21"
  int s = 1;          ///< input index (1 or 2)
  std::size_t i = 0;  ///< channel, 1-based as in the usual notation
  FieldElement element = FieldElement::constant(0.0);
};

inline std::vector<B2Element> b2_elements(const EscSystemSpec& spec) {
  std::vector<B2Element> out;
  for (const auto& c : spec.channels) {
    const std::size_t i = c.index + 1;
    out.push_back({"b_1" + std::to_string(i), 1, i, c.b1});
    out.push_back({"b_2" + std::to_string(i), 2, i, c.b2});
  }
  return out;
}

/// Constants of the full practical-stability condition. Recorded for
/// completeness; this tool does not search for them.
struct B1Constants {
  std::optional<double> gamma1, gamma2, kappa1, kappa2, mu, m1;
};

struct B2ElementResult {
  B2Element element;
  double value_at_extremum = 0.0;  ///< b_si(f~(x*))
  bool contradiction = false;      ///< |b_si| > 0 while f~(x*) = 0
  bool satisfiable = true;
  /// Least-squares fit of log|b| = log M + m3 log|f~| over domain samples.
  std::optional<double> fitted_m3;
  std::optional<double> required_m;  ///< max |b| / |f~|^m3 at the fitted m3
  std::size_t probe_samples = 0;
};

/// Outcome of the vanishing-oscillation bound check |b_si| <= M f~^m3.
struct B2Report {
  Vector extremum;
  double extremum_value = 0.0;
  double shifted_at_extremum = 0.0;
  std::vector<B2ElementResult> elements;
  B1Constants b1;  // documentation only

  bool contradiction() const {
    return std::any_of(elements.begin(), elements.end(),
                       [](const B2ElementResult& e) { return e.contradiction; });
  }
};

/// Evaluates every element at the extremum, where f~ = f - f* vanishes, and
/// flags those that stay nonzero: no M, m3 can bound them there. A
/// log-log least-squares probe over the domain box is reported alongside as
/// an advisory.
inline B2Report check_b2(const std::vector<B2Element>& elements,
                         const ObjectiveMap& objective, const DomainBox& domain,
                         std::size_t samples = 2000, std::uint64_t seed = 1) {
  if (!objective.extremum() || !objective.extremum_value()) {
    throw CapabilityError("check_b2 needs the extremum point and value");
  }
  B2Report report;
  report.extremum = *objective.extremum();
  report.extremum_value = *objective.extremum_value();
  // Elements take the seek signal shifted to vanish at x*, i.e. +-(f - f*).
  const double seek_at_star = objective.seek_value(report.extremum);
  auto argument = [&](const Vector& x) { return objective.seek_value(x) - seek_at_star; };
  report.shifted_at_extremum = objective.shifted(report.extremum);

  std::mt19937_64 rng(seed);
  std::vector<Vector> points;
  points.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    Vector x(domain.dimension());
    for (Eigen::Index d = 0; d < x.size(); ++d) {
      std::uniform_real_distribution<double> u(domain.lower[d], domain.upper[d]);
      x[d] = u(rng);
    }
    points.push_back(std::move(x));
  }

  for (const auto& e : elements) {
    B2ElementResult r;
    r.element = e;
    r.value_at_extremum = e.element(0.0);
    r.contradiction = std::abs(report.shifted_at_extremum) <= 1e-12 &&
                      std::abs(r.value_at_extremum) > 1e-12;
    r.satisfiable = !r.contradiction;

    // log|b| = log M + m3 log|f~|
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<std::pair<double, double>> pts;
    for (const auto& x : points) {
      const double ft = std::abs(objective.shifted(x));
      const double b = std::abs(e.element(argument(x)));
      if (ft <= 1e-12 || b <= 1e-300) continue;
      const double lx = std::log(ft);
      const double ly = std::log(b);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      pts.emplace_back(ft, b);
    }
    r.probe_samples = pts.size();
    const double m = static_cast<double>(pts.size());
    const double den = m * sxx - sx * sx;
    if (pts.size() >= 2 && std::abs(den) > 1e-12) {
      const double slope = (m * sxy - sx * sy) / den;
      r.fitted_m3 = slope;
      double need = 0.0;
      for (const auto& [ft, b] : pts) {
        need = std::max(need, b / std::pow(ft, slope));
      }
      r.required_m = need;
    }
    report.elements.push_back(std::move(r));
  }
  return report;
}

inline B2Report check_b2(const EscSystemSpec& spec, std::size_t samples = 2000) {
  return check_b2(b2_elements(spec), spec.objective, spec.domain, samples);
}

inline nlohmann::json to_json(const B2Report& r) {
  nlohmann::json elems = nlohmann::json::array();
  for (const auto& e : r.elements) {
    elems.push_back({
        {"element", e.element.label},
        {"s", e.element.s},
        {"i", e.element.i},
        {"value_at_extremum", e.value_at_extremum},
        {"contradiction", e.contradiction},
        {"satisfiable", e.satisfiable},
        {"fitted_m3", e.fitted_m3 ? nlohmann::json(*e.fitted_m3) : nlohmann::json(nullptr)},
        {"required_M", e.required_m ? nlohmann::json(*e.required_m) : nlohmann::json(nullptr)},
        {"probe_samples", e.probe_samples},
    });
  }
  std::vector<double> xs(r.extremum.data(), r.extremum.data() + r.extremum.size());
  return {{"extremum", xs},
          {"extremum_value", r.extremum_value},
          {"shifted_objective_at_extremum", r.shifted_at_extremum},
          {"contradiction", r.contradiction()},
          {"elements", elems}};
}

}  // namespace lbesc
