#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lbesc/core/system.hpp"
#include "lbesc/errors.hpp"
#include "lbesc/gekf/gekf.hpp"

namespace lbesc {

struct AnalysisSettings {
  double p = 1.05;
  double t_min = 1.0;   ///< s
  double window = 10.0; ///< s, envelope window

  friend bool operator==(const AnalysisSettings&, const AnalysisSettings&) = default;
};

/// One independent ESC loop inside a scenario.
struct AgentConfig {
  std::string name;
  double omega_multiplier = 1.0;
  ObjectiveMap objective;
  DomainBox domain;
  std::vector<ChannelSpec> channels;
  Vector x0;
  Vector a0;
  Vector lambda;
  bool default_fill = false;  ///< values not taken from the reference cases
};

inline bool same_objective(const ObjectiveMap& l, const ObjectiveMap& r) {
  if (l.form() != ObjectiveMap::Form::quadratic || r.form() != ObjectiveMap::Form::quadratic) {
    return false;
  }
  return l.kind() == r.kind() && l.weights() == r.weights() && l.center() == r.center() &&
         l.offset() == r.offset() && l.extremum_value() == r.extremum_value();
}

inline bool operator==(const AgentConfig& l, const AgentConfig& r) {
  return l.name == r.name && l.omega_multiplier == r.omega_multiplier &&
         same_objective(l.objective, r.objective) && l.domain == r.domain &&
         l.channels == r.channels && l.x0 == r.x0 && l.a0 == r.a0 && l.lambda == r.lambda &&
         l.default_fill == r.default_fill;
}

struct Scenario {
  std::string name;
  std::string note;
  double omega = 1.0;    ///< base dither frequency, rad/s
  double horizon = 1.0;  ///< s
  std::optional<double> dt;  ///< s; derived from the fastest dither when empty
  double steps_per_period = 64.0;
  std::vector<AgentConfig> agents;
  std::size_t primary_agent = 0;
  GekfConfig gekf;
  AnalysisSettings analysis;

  friend bool operator==(const Scenario&, const Scenario&) = default;

  const AgentConfig& primary() const { return agents.at(primary_agent); }

  /// Runnable system for agent k with dt resolved.
  EscSystemSpec system(std::size_t k) const {
    if (k >= agents.size()) {
      throw LookupError("scenario " + name + " has no agent " + std::to_string(k));
    }
    const AgentConfig& ag = agents[k];
    EscSystemSpec s;
    s.objective = ag.objective;
    s.domain = ag.domain;
    s.channels = ag.channels;
    s.omega = omega * ag.omega_multiplier;
    s.a0 = ag.a0;
    s.lambda = ag.lambda;
    s.x0 = ag.x0;
    s.horizon = horizon;
    s.dt = dt ? *dt : default_dt(s, steps_per_period);
    return s;
  }

  EscSystemSpec primary_system() const { return system(primary_agent); }

  std::size_t agent_index(const std::string& agent) const {
    for (std::size_t k = 0; k < agents.size(); ++k) {
      if (agents[k].name == agent) return k;
    }
    throw LookupError("scenario " + name + " has no agent named " + agent);
  }

  void set_lambda(double value) {
    for (auto& ag : agents) ag.lambda.setConstant(value);
  }
};

inline void validate(const Scenario& sc) {
  if (sc.name.empty()) {
    throw ConfigError("scenario needs a name");
  }
  if (sc.agents.empty()) {
    throw ConfigError("scenario needs at least one agent");
  }
  if (sc.primary_agent >= sc.agents.size()) {
    throw ConfigError("primary agent index out of range");
  }
  if (!(sc.omega > 0.0) || !(sc.horizon > 0.0) || !(sc.steps_per_period >= 32.0)) {
    throw ConfigError("scenario needs omega > 0, horizon > 0 and >= 32 steps per period");
  }
  if (!(sc.analysis.p > 1.0) || !(sc.analysis.t_min > 0.0) || !(sc.analysis.window > 0.0)) {
    throw ConfigError("analysis settings need p > 1, t_min > 0 and window > 0");
  }
  validate(sc.gekf);
  for (std::size_t k = 0; k < sc.agents.size(); ++k) {
    validate(sc.system(k));
  }
}

namespace presets {

inline std::vector<ChannelSpec> cos_sin_channels(std::vector<std::pair<FieldElement, FieldElement>> fields,
                                                 std::vector<double> scales = {}) {
  std::vector<ChannelSpec> out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    ChannelSpec c;
    c.index = i;
    c.b1 = fields[i].first;
    c.b2 = fields[i].second;
    c.dither1 = DitherSignal::cosine();
    c.dither2 = DitherSignal::sine();
    c.frequency_scale = i < scales.size() ? scales[i] : 1.0;
    out.push_back(std::move(c));
  }
  return out;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

/// Scalar minimisation of f = 2(x - 1)^2 with b1 = f, b2 = 1.
inline Scenario case1() {
  Scenario sc;
  sc.name = "case1";
  sc.note = "scalar quadratic, f = 2(x-1)^2, b1 = f, b2 = 1";
  sc.omega = 8.0;
  sc.horizon = 100.0;
  AgentConfig ag;
  ag.name = "agent";
  ag.objective = ObjectiveMap::quadratic(vec({2.0}), vec({1.0}), 0.0, ExtremumKind::minimum);
  ag.domain = {vec({-2.0}), vec({4.0})};
  ag.channels = cos_sin_channels({{FieldElement::affine(1.0), FieldElement::constant(1.0)}});
  ag.x0 = vec({2.0});
  ag.a0 = vec({1.0});
  ag.lambda = vec({0.1});
  sc.agents.push_back(std::move(ag));
  sc.gekf.q1 = 0.1;
  sc.gekf.q2 = 10.0;
  sc.gekf.q3 = 1e-2;
  sc.gekf.r = 1e-2;
  return sc;
}

/// Planar minimisation of x^2 + y^2 with bounded-update fields sharing one
/// cos/sin dither pair.
inline Scenario case2() {
  constexpr double alpha = 0.5;
  constexpr double k = 2.0;
  Scenario sc;
  sc.name = "case2";
  sc.note = "bounded-update ESC, f = x^2 + y^2, alpha = 0.5, k = 2; x0 = (1, 1) is a default fill";
  sc.omega = 25.0;
  sc.horizon = 100.0;
  AgentConfig ag;
  ag.name = "agent";
  ag.objective = ObjectiveMap::quadratic(vec({1.0, 1.0}), vec({0.0, 0.0}), 0.0,
                                         ExtremumKind::minimum);
  ag.domain = DomainBox::symmetric(2, 3.0);
  ag.channels = cos_sin_channels({{FieldElement::cosine(1.0, k), FieldElement::sine(-1.0, k)},
                                  {FieldElement::sine(1.0, k), FieldElement::cosine(1.0, k)}});
  ag.x0 = vec({1.0, 1.0});
  ag.a0 = Vector::Constant(2, std::sqrt(alpha));
  ag.lambda = vec({0.1, 0.1});
  ag.default_fill = true;
  sc.agents.push_back(std::move(ag));
  sc.gekf.q1 = 1e-2;
  sc.gekf.q2 = 1.0;
  sc.gekf.q3 = 1e-2;
  sc.gekf.r = 1e-2;
  return sc;
}

/// Three independent planar vehicles maximising their own maps. Each
/// vehicle uses b11 = c3 f~, b21 = a3 on x and b12 = a3, b22 = -c3 f~ on y,
/// the y channel dithered at twice the x frequency.
inline Scenario case3() {
  constexpr double c3 = 1.0;
  constexpr double a3 = 0.3;
  Scenario sc;
  sc.name = "case3";
  sc.note =
      "three vehicles, vehicle-3 f = -(x+1)^2/2 - 3(y-1)^2/2 + 10; vehicles 1-2, "
      "c3, a3, washout off and x0 are default fills";
  sc.omega = 25.0;
  sc.horizon = 300.0;
  const auto fields = [] {
    return cos_sin_channels({{FieldElement::affine(c3), FieldElement::constant(a3)},
                             {FieldElement::constant(a3), FieldElement::affine(-c3)}},
                            {1.0, 2.0});
  };
  struct Map {
    const char* name;
    double mult;
    Vector w, c;
    double fstar;
  };
  const std::vector<Map> maps = {
      {"vehicle-1", 1.0, vec({-0.5, -0.5}), vec({1.0, -1.0}), 0.0},
      {"vehicle-2", 1.1, vec({-0.5, -0.5}), vec({0.0, 2.0}), 0.0},
      {"vehicle-3", 1.2, vec({-0.5, -1.5}), vec({-1.0, 1.0}), 10.0},
  };
  for (const auto& m : maps) {
    AgentConfig ag;
    ag.name = m.name;
    ag.omega_multiplier = m.mult;
    ag.objective = ObjectiveMap::quadratic(m.w, m.c, m.fstar, ExtremumKind::maximum);
    ag.domain = DomainBox::symmetric(2, 4.0);
    ag.channels = fields();
    ag.x0 = vec({0.0, 0.0});
    ag.a0 = Vector::Constant(2, 1.2);
    ag.lambda = Vector::Constant(2, 0.02);
    ag.default_fill = true;
    sc.agents.push_back(std::move(ag));
  }
  sc.primary_agent = 2;
  sc.gekf.q1 = 1e-2;
  sc.gekf.q2 = 1.0;
  sc.gekf.q3 = 1e-2;
  sc.gekf.r = 1e-2;
  return sc;
}

}  // namespace presets

inline std::vector<std::string> preset_names() { return {"case1", "case2", "case3"}; }

inline Scenario preset(const std::string& name) {
  if (name == "case1") return presets::case1();
  if (name == "case2") return presets::case2();
  if (name == "case3") return presets::case3();
  std::string known;
  for (const auto& n : preset_names()) {
    known += known.empty() ? n : ", " + n;
  }
  throw LookupError("unknown scenario '" + name + "'; available presets: " + known);
}

}  // namespace lbesc
