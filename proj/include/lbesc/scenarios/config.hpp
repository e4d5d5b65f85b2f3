#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lbesc/errors.hpp"
#include "lbesc/scenarios/scenario.hpp"

namespace lbesc {

namespace config_detail {

using nlohmann::json;

inline json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Vector vec(const json& j, const char* key) {
  if (!j.is_array()) {
    throw ConfigError(std::string("config key '") + key + "' must be an array of numbers");
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) {
      throw ConfigError(std::string("config key '") + key + "' must be an array of numbers");
    }
    v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  }
  return v;
}

inline const json& at(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("config is missing key '") + key + "'");
  }
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return at(j, key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

inline json field(const FieldElement& e) {
  switch (e.form()) {
    case FieldElement::Form::affine:
      return {{"form", "affine"}, {"gain", e.gain()}, {"offset", e.offset()}};
    case FieldElement::Form::cosine:
      return {{"form", "cosine"}, {"gain", e.gain()}, {"k", e.k()}};
    case FieldElement::Form::sine:
      return {{"form", "sine"}, {"gain", e.gain()}, {"k", e.k()}};
    case FieldElement::Form::custom:
      break;
  }
  throw ConfigError("custom field elements cannot be written to a config file");
}

inline FieldElement field(const json& j) {
  const auto form = get<std::string>(j, "form");
  if (form == "affine") return FieldElement::affine(get<double>(j, "gain"), get_or(j, "offset", 0.0));
  if (form == "constant") return FieldElement::constant(get<double>(j, "value"));
  if (form == "cosine") return FieldElement::cosine(get<double>(j, "gain"), get<double>(j, "k"));
  if (form == "sine") return FieldElement::sine(get<double>(j, "gain"), get<double>(j, "k"));
  throw ConfigError("unknown field element form '" + form + "'");
}

inline json dither(const DitherSignal& d) {
  json j;
  switch (d.kind()) {
    case DitherKind::cosine:
      j["kind"] = "cosine";
      j["phase"] = d.phase();
      break;
    case DitherKind::sine:
      j["kind"] = "sine";
      j["phase"] = d.phase();
      break;
    case DitherKind::tabulated: {
      j["kind"] = "tabulated";
      json s = json::array();
      for (const auto& p : d.samples()) s.push_back({p.theta, p.value});
      j["samples"] = s;
      break;
    }
  }
  j["period"] = d.period();
  j["bound"] = d.bound();
  return j;
}

inline DitherSignal dither(const json& j) {
  const auto kind = get<std::string>(j, "kind");
  const double period = get_or(j, "period", kTwoPi);
  const double bound = get_or(j, "bound", 1.0);
  if (kind == "cosine") return DitherSignal::cosine(get_or(j, "phase", 0.0), period, bound);
  if (kind == "sine") return DitherSignal::sine(get_or(j, "phase", 0.0), period, bound);
  if (kind == "tabulated") {
    std::vector<DitherSample> samples;
    for (const auto& p : at(j, "samples")) {
      if (!p.is_array() || p.size() != 2) {
        throw ConfigError("tabulated dither samples must be [theta, value] pairs");
      }
      samples.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return DitherSignal::tabulated(std::move(samples), period, bound);
  }
  throw ConfigError("unknown dither kind '" + kind + "'");
}

inline json objective(const ObjectiveMap& m) {
  if (m.form() != ObjectiveMap::Form::quadratic) {
    throw ConfigError("custom objectives cannot be written to a config file");
  }
  return {{"form", "quadratic"},
          {"kind", m.kind() == ExtremumKind::minimum ? "minimum" : "maximum"},
          {"weights", vec(m.weights())},
          {"center", vec(m.center())},
          {"offset", m.offset()}};
}

inline ObjectiveMap objective(const json& j) {
  const auto form = get<std::string>(j, "form");
  if (form != "quadratic") {
    throw ConfigError("only quadratic objectives can be read from a config file");
  }
  const auto kind = get_or<std::string>(j, "kind", "minimum");
  if (kind != "minimum" && kind != "maximum") {
    throw ConfigError("objective kind must be 'minimum' or 'maximum'");
  }
  return ObjectiveMap::quadratic(vec(at(j, "weights"), "weights"), vec(at(j, "center"), "center"),
                                 get_or(j, "offset", 0.0),
                                 kind == "minimum" ? ExtremumKind::minimum : ExtremumKind::maximum);
}

inline json agent(const AgentConfig& a) {
  json channels = json::array();
  for (const auto& c : a.channels) {
    channels.push_back({{"b1", field(c.b1)},
                        {"b2", field(c.b2)},
                        {"dither1", dither(c.dither1)},
                        {"dither2", dither(c.dither2)},
                        {"frequency_scale", c.frequency_scale}});
  }
  return {{"name", a.name},
          {"omega_multiplier", a.omega_multiplier},
          {"objective", objective(a.objective)},
          {"domain", {{"lower", vec(a.domain.lower)}, {"upper", vec(a.domain.upper)}}},
          {"channels", channels},
          {"x0", vec(a.x0)},
          {"a0", vec(a.a0)},
          {"lambda", vec(a.lambda)},
          {"default_fill", a.default_fill}};
}

inline AgentConfig agent(const json& j) {
  AgentConfig a;
  a.name = get<std::string>(j, "name");
  a.omega_multiplier = get_or(j, "omega_multiplier", 1.0);
  a.objective = objective(at(j, "objective"));
  const auto& dom = at(j, "domain");
  a.domain = {vec(at(dom, "lower"), "lower"), vec(at(dom, "upper"), "upper")};
  std::size_t index = 0;
  for (const auto& c : at(j, "channels")) {
    ChannelSpec ch;
    ch.index = index++;
    ch.b1 = field(at(c, "b1"));
    ch.b2 = field(at(c, "b2"));
    ch.dither1 = dither(at(c, "dither1"));
    ch.dither2 = dither(at(c, "dither2"));
    ch.frequency_scale = get_or(c, "frequency_scale", 1.0);
    a.channels.push_back(std::move(ch));
  }
  a.x0 = vec(at(j, "x0"), "x0");
  a.a0 = vec(at(j, "a0"), "a0");
  a.lambda = vec(at(j, "lambda"), "lambda");
  a.default_fill = get_or(j, "default_fill", false);
  return a;
}

}  // namespace config_detail

inline nlohmann::json to_json(const Scenario& sc) {
  using namespace config_detail;
  json agents = json::array();
  for (const auto& a : sc.agents) agents.push_back(agent(a));
  const auto& g = sc.gekf;
  json j;
  j["name"] = sc.name;
  j["note"] = sc.note;
  j["omega"] = sc.omega;
  j["horizon"] = sc.horizon;
  j["dt"] = sc.dt ? json(*sc.dt) : json(nullptr);
  j["steps_per_period"] = sc.steps_per_period;
  j["primary_agent"] = sc.primary_agent;
  j["agents"] = agents;
  j["gekf"] = {{"q1", g.q1},
               {"q2", g.q2},
               {"q3", g.q3},
               {"r", g.r},
               {"p0", g.p0},
               {"a_floor_ratio", g.a_floor_ratio},
               {"floor_decay", g.floor_decay},
               {"smoothing", g.smoothing},
               {"measurement_every", g.measurement_every}};
  j["analysis"] = {{"p", sc.analysis.p},
                   {"t_min", sc.analysis.t_min},
                   {"window", sc.analysis.window}};
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  using namespace config_detail;
  Scenario sc;
  sc.name = get<std::string>(j, "name");
  sc.note = get_or<std::string>(j, "note", "");
  sc.omega = get<double>(j, "omega");
  sc.horizon = get<double>(j, "horizon");
  if (j.contains("dt") && !j.at("dt").is_null()) {
    sc.dt = get<double>(j, "dt");
  }
  sc.steps_per_period = get_or(j, "steps_per_period", 64.0);
  sc.primary_agent = get_or<std::size_t>(j, "primary_agent", 0);
  for (const auto& a : at(j, "agents")) sc.agents.push_back(agent(a));
  if (j.contains("gekf")) {
    const auto& g = j.at("gekf");
    GekfConfig d;
    sc.gekf.q1 = get_or(g, "q1", d.q1);
    sc.gekf.q2 = get_or(g, "q2", d.q2);
    sc.gekf.q3 = get_or(g, "q3", d.q3);
    sc.gekf.r = get_or(g, "r", d.r);
    sc.gekf.p0 = get_or(g, "p0", d.p0);
    sc.gekf.a_floor_ratio = get_or(g, "a_floor_ratio", d.a_floor_ratio);
    sc.gekf.floor_decay = get_or(g, "floor_decay", d.floor_decay);
    sc.gekf.smoothing = get_or(g, "smoothing", d.smoothing);
    sc.gekf.measurement_every = get_or(g, "measurement_every", d.measurement_every);
  }
  if (j.contains("analysis")) {
    const auto& a = j.at("analysis");
    sc.analysis.p = get_or(a, "p", sc.analysis.p);
    sc.analysis.t_min = get_or(a, "t_min", sc.analysis.t_min);
    sc.analysis.window = get_or(a, "window", sc.analysis.window);
  }
  validate(sc);
  return sc;
}

inline std::string serialize(const Scenario& sc) { return to_json(sc).dump(2) + "\n"; }

inline Scenario parse_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("scenario file is not valid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open scenario file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

/// A preset name, or a path to a scenario file.
inline Scenario resolve_scenario(const std::string& name_or_path) {
  for (const auto& n : preset_names()) {
    if (n == name_or_path) return preset(n);
  }
  if (std::filesystem::is_regular_file(name_or_path)) {
    return load_scenario(name_or_path);
  }
  return preset(name_or_path);
}

}  // namespace lbesc
