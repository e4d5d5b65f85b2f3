#pragma once

#include <cstdint>
#include <filesystem>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lbesc/analysis/b2.hpp"
#include "lbesc/analysis/bound_check.hpp"
#include "lbesc/analysis/metrics.hpp"
#include "lbesc/scenarios/config.hpp"
#include "lbesc/scenarios/csv.hpp"
#include "lbesc/sim/runners.hpp"

namespace lbesc {

enum class ModeSelection { baseline, proposed, lbs, both };

inline ModeSelection parse_mode(const std::string& s) {
  if (s == "baseline") return ModeSelection::baseline;
  if (s == "proposed") return ModeSelection::proposed;
  if (s == "lbs") return ModeSelection::lbs;
  if (s == "both") return ModeSelection::both;
  throw ConfigError("unknown mode '" + s + "'; expected baseline, proposed, lbs or both");
}

struct RunRequest {
  ModeSelection mode = ModeSelection::both;
  std::uint64_t seed = 0;
  double noise_std = 0.0;
  std::size_t log_every = 1;
  bool diagnostics = false;  ///< also write the filter internals CSV
};

struct AgentRun {
  std::string agent;
  EscSystemSpec system;
  std::optional<TrajectoryLog> baseline;
  std::optional<TrajectoryLog> proposed;
  std::optional<TrajectoryLog> lbs;
};

struct ScenarioRun {
  Scenario scenario;
  RunRequest request;
  std::vector<AgentRun> agents;
};

struct RunArtifacts {
  std::vector<std::filesystem::path> trajectories;
  std::filesystem::path report;
  std::filesystem::path config;
  std::vector<std::filesystem::path> diagnostics;
};

/// Runs every agent of the scenario in the requested mode(s).
inline ScenarioRun execute(const Scenario& sc, const RunRequest& req) {
  validate(sc);
  SimOptions opts;
  opts.log_every = req.log_every;
  opts.seed = req.seed;
  opts.noise_std = req.noise_std;
  ScenarioRun run{sc, req, {}};
  for (std::size_t k = 0; k < sc.agents.size(); ++k) {
    AgentRun ar;
    ar.agent = sc.agents[k].name;
    ar.system = sc.system(k);
    const bool base = req.mode == ModeSelection::baseline || req.mode == ModeSelection::both;
    const bool prop = req.mode == ModeSelection::proposed || req.mode == ModeSelection::both;
    if (base) ar.baseline = run_baseline(ar.system, opts);
    if (prop) {
      SimOptions p = opts;
      p.seed = opts.seed + k;
      ar.proposed = run_proposed(ar.system, sc.gekf, p);
    }
    if (req.mode == ModeSelection::lbs) ar.lbs = run_lbs(ar.system, std::nullopt, opts);
    run.agents.push_back(std::move(ar));
  }
  return run;
}

inline nlohmann::json report(const ScenarioRun& run) {
  using nlohmann::json;
  const Scenario& sc = run.scenario;
  json params = to_json(sc);
  json resolved = json::object();
  json metrics_j = json::object();
  json bounds = json::object();
  json b2 = json::object();
  json comparison = json::object();
  json deviation = json::object();

  for (const auto& ar : run.agents) {
    const auto& spec = ar.system;
    resolved[ar.agent] = {{"omega", spec.omega},
                          {"dt", spec.dt},
                          {"steps", spec.step_count()},
                          {"steps_per_period", spec.steps_per_period()}};
    const Vector x_star = spec.objective.extremum().value_or(Vector::Zero(spec.x0.size()));
    json m = json::object();
    for (const auto* log : {&ar.baseline, &ar.proposed, &ar.lbs}) {
      if (*log) m[to_string((*log)->mode)] = to_json(lbesc::metrics(**log, x_star, sc.analysis.window));
    }
    metrics_j[ar.agent] = m;
    if (ar.baseline && ar.proposed) {
      comparison[ar.agent] = to_json(compare(*ar.baseline, *ar.proposed, x_star, sc.analysis.window,
                                             sc.analysis.p, sc.analysis.t_min));
    }
    if (ar.baseline && ar.baseline->samples.front().z_ref) {
      deviation[ar.agent] = sup_deviation(*ar.baseline);
    }
    if (ar.proposed) {
      json bc;
      bc["estimated"] = to_json(check_bound(*ar.proposed, sc.analysis.p, sc.analysis.t_min,
                                            JSource::estimated));
      if (ar.proposed->samples.front().j_exact) {
        bc["exact"] = to_json(
            check_bound(*ar.proposed, sc.analysis.p, sc.analysis.t_min, JSource::exact));
      }
      bounds[ar.agent] = bc;
    }
    if (spec.objective.extremum() && spec.objective.extremum_value()) {
      b2[ar.agent] = to_json(check_b2(spec));
    }
  }
  params["resolved"] = resolved;
  params["seed"] = run.request.seed;
  params["noise_std"] = run.request.noise_std;
  return {{"scenario", sc.name},
          {"params", params},
          {"metrics", metrics_j},
          {"comparison", comparison},
          {"deviation_from_lbs", deviation},
          {"bound_check", bounds},
          {"b2", b2}};
}

inline std::string trajectory_stem(const ScenarioRun& run, const AgentRun& ar) {
  return run.agents.size() == 1 ? run.scenario.name : run.scenario.name + "_" + ar.agent;
}

/// Writes one CSV per agent and mode, the JSON report and the resolved
/// config snapshot into `dir`.
inline RunArtifacts write_artifacts(const ScenarioRun& run, const std::filesystem::path& dir) {
  RunArtifacts out;
  for (const auto& ar : run.agents) {
    const std::string stem = trajectory_stem(run, ar);
    for (const auto* log : {&ar.baseline, &ar.proposed, &ar.lbs}) {
      if (!*log) continue;
      const auto path = dir / (stem + "_" + to_string((*log)->mode) + ".csv");
      write_atomic(path, to_csv(**log));
      out.trajectories.push_back(path);
      if (run.request.diagnostics && (*log)->mode == RunMode::proposed) {
        const auto dpath = dir / (stem + "_gekf.csv");
        write_atomic(dpath, gekf_csv(**log));
        out.diagnostics.push_back(dpath);
      }
    }
  }
  out.report = dir / (run.scenario.name + "_report.json");
  write_atomic(out.report, report(run).dump(2) + "\n");
  out.config = dir / (run.scenario.name + "_config.json");
  write_atomic(out.config, serialize(run.scenario));
  return out;
}

enum class SweepParameter { omega, lambda };

struct SweepPoint {
  double value = 0.0;
  std::filesystem::path dir;
  ScenarioRun run;
};

inline std::string sweep_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// One run per value, executed in parallel; each point owns its scenario
/// copy and output directory.
inline std::vector<SweepPoint> sweep(const Scenario& base, SweepParameter param,
                                     const std::vector<double>& values, const RunRequest& req,
                                     const std::filesystem::path& out_dir) {
  if (values.empty()) {
    throw InputError("sweep needs at least one value");
  }
  const std::string key = param == SweepParameter::omega ? "omega" : "lambda";
  std::vector<std::future<SweepPoint>> jobs;
  for (double v : values) {
    Scenario sc = base;
    if (param == SweepParameter::omega) {
      sc.omega = v;
    } else {
      sc.set_lambda(v);
    }
    const auto dir = out_dir / (key + "_" + sweep_label(v));
    jobs.push_back(std::async(std::launch::async, [sc = std::move(sc), req, dir, v] {
      SweepPoint p{v, dir, execute(sc, req)};
      write_artifacts(p.run, dir);
      return p;
    }));
  }
  std::vector<SweepPoint> points;
  for (auto& j : jobs) points.push_back(j.get());
  return points;
}

inline nlohmann::json sweep_summary(const Scenario& base, SweepParameter param,
                                    const std::vector<SweepPoint>& points) {
  using nlohmann::json;
  const std::string key = param == SweepParameter::omega ? "omega" : "lambda";
  json table = json::array();
  for (const auto& p : points) {
    const AgentRun& ar = p.run.agents.at(p.run.scenario.primary_agent);
    const TrajectoryLog* log = ar.proposed ? &*ar.proposed : ar.baseline ? &*ar.baseline : nullptr;
    json row;
    row[key] = p.value;
    row["dir"] = p.dir.string();
    if (log) {
      const Vector x_star =
          ar.system.objective.extremum().value_or(Vector::Zero(ar.system.x0.size()));
      const RunMetrics m = lbesc::metrics(*log, x_star, p.run.scenario.analysis.window);
      row["mode"] = to_string(log->mode);
      row["final_error"] = m.final_error;
      row["settling_time"] = m.settling_time ? json(*m.settling_time) : json(nullptr);
      row["envelope_max"] = m.envelope_max;
      row["deviation"] = log->samples.front().z_ref ? json(sup_deviation(*log)) : json(nullptr);
    }
    table.push_back(row);
  }
  bool decreasing = points.size() > 1;
  for (std::size_t k = 1; k < table.size(); ++k) {
    const auto& a = table[k - 1]["deviation"];
    const auto& b = table[k]["deviation"];
    decreasing = decreasing && a.is_number() && b.is_number() && b.get<double>() < a.get<double>();
  }
  return {{"scenario", base.name},
          {"parameter", key},
          {"agent", base.primary().name},
          {"table", table},
          {"deviation_strictly_decreasing", decreasing}};
}

}  // namespace lbesc
