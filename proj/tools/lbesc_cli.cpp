#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lbesc/scenarios/commands.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kRuntime = 3;

struct Overrides {
  std::optional<double> omega;
  std::optional<double> lambda;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<double> p;
};

void apply(lbesc::Scenario& sc, const Overrides& o) {
  if (o.omega) sc.omega = *o.omega;
  if (o.lambda) sc.set_lambda(*o.lambda);
  if (o.dt) sc.dt = *o.dt;
  if (o.horizon) sc.horizon = *o.horizon;
  if (o.p) sc.analysis.p = *o.p;
}

void emit(const nlohmann::json& j, const std::string& out_file) {
  std::cout << j.dump(2) << "\n";
  if (!out_file.empty()) {
    lbesc::write_atomic(out_file, j.dump(2) + "\n");
  }
}

int cmd_list() {
  for (const auto& name : lbesc::preset_names()) {
    const auto sc = lbesc::preset(name);
    std::cout << name << "  " << sc.note << "\n";
  }
  return kPass;
}

int cmd_run(const std::string& target, const Overrides& o, const std::string& mode,
            const lbesc::RunRequest& base_req, const std::string& out) {
  auto sc = lbesc::resolve_scenario(target);
  apply(sc, o);
  lbesc::RunRequest req = base_req;
  req.mode = lbesc::parse_mode(mode);
  const auto run = lbesc::execute(sc, req);
  const auto art = lbesc::write_artifacts(run, out);
  for (const auto& p : art.trajectories) std::cout << "wrote " << p.string() << "\n";
  for (const auto& p : art.diagnostics) std::cout << "wrote " << p.string() << "\n";
  std::cout << "wrote " << art.report.string() << "\n";
  std::cout << "wrote " << art.config.string() << "\n";
  return kPass;
}

int cmd_sweep(const std::string& target, Overrides o, const std::vector<double>& omegas,
              const std::vector<double>& lambdas, const std::string& mode,
              const lbesc::RunRequest& base_req, const std::string& out) {
  if (!omegas.empty() && !lambdas.empty()) {
    throw CLI::ValidationError("sweep", "give either --omega or --lambda values, not both");
  }
  if (omegas.empty() && lambdas.empty()) {
    throw lbesc::InputError("sweep needs a non-empty --omega or --lambda list");
  }
  auto sc = lbesc::resolve_scenario(target);
  o.omega.reset();
  o.lambda.reset();
  apply(sc, o);
  lbesc::RunRequest req = base_req;
  req.mode = lbesc::parse_mode(mode);
  const auto param = omegas.empty() ? lbesc::SweepParameter::lambda : lbesc::SweepParameter::omega;
  const auto& values = omegas.empty() ? lambdas : omegas;
  const auto points = lbesc::sweep(sc, param, values, req, out);
  const auto summary = lbesc::sweep_summary(sc, param, points);
  const std::filesystem::path path = std::filesystem::path(out) / (sc.name + "_sweep.json");
  emit(summary, path.string());
  return kPass;
}

int cmd_check_bound(const std::string& csv, double p, double t_min, const std::string& source,
                    const std::string& out) {
  const auto log = lbesc::read_csv(csv);
  if (source != "estimated" && source != "exact") {
    throw CLI::ValidationError("--source", "expected 'estimated' or 'exact'");
  }
  const auto results = lbesc::check_bound(
      log, p, t_min, source == "estimated" ? lbesc::JSource::estimated : lbesc::JSource::exact);
  auto j = lbesc::to_json(results);
  j["source"] = source;
  j["file"] = csv;
  emit(j, out);
  return lbesc::all_hold(results) ? kPass : kCheckFailed;
}

int cmd_check_b2(const std::string& target, const std::string& agent, std::size_t samples,
                 const std::string& out) {
  const auto sc = lbesc::resolve_scenario(target);
  const std::size_t k = agent.empty() ? sc.primary_agent : sc.agent_index(agent);
  const auto report = lbesc::check_b2(sc.system(k), samples);
  auto j = lbesc::to_json(report);
  j["scenario"] = sc.name;
  j["agent"] = sc.agents[k].name;
  if (report.contradiction()) {
    for (const auto& e : report.elements) {
      if (e.contradiction) {
        std::cerr << "contradiction: |" << e.element.label << "| = " << std::abs(e.value_at_extremum)
                  << " at the extremum, where f - f* = 0; the bound reduces to |"
                  << e.element.label << "| <= 0\n";
      }
    }
  }
  emit(j, out);
  return report.contradiction() ? kCheckFailed : kPass;
}

int cmd_compare(const std::string& baseline, const std::string& proposed,
                const std::string& target, std::vector<double> x_star, double window, double p,
                double t_min, const std::string& out) {
  const auto b = lbesc::read_csv(baseline);
  const auto q = lbesc::read_csv(proposed);
  lbesc::Vector xs;
  if (!target.empty()) {
    const auto sc = lbesc::resolve_scenario(target);
    xs = *sc.primary().objective.extremum();
  } else if (!x_star.empty()) {
    xs = Eigen::Map<lbesc::Vector>(x_star.data(), static_cast<Eigen::Index>(x_star.size()));
  } else {
    throw CLI::ValidationError("compare", "give --scenario or --xstar");
  }
  const auto r = lbesc::compare(b, q, xs, window, p, t_min);
  emit(lbesc::to_json(r), out);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Amplitude-adaptive extremum seeking: simulations and checks"};
  app.require_subcommand(1);

  Overrides o;
  std::string mode = "both";
  std::string out = "out";
  std::string out_file;
  lbesc::RunRequest req;
  std::string target;

  auto* list = app.add_subcommand("list", "List preset scenarios");

  auto add_common = [&](CLI::App* c) {
    c->add_option("scenario", target, "Preset name or scenario JSON file")->required();
    c->add_option("--mode", mode, "baseline | proposed | lbs | both")
        ->check(CLI::IsMember({"baseline", "proposed", "lbs", "both"}));
    c->add_option("--dt", o.dt, "Integrator step [s]")->check(CLI::PositiveNumber);
    c->add_option("--horizon", o.horizon, "Simulated time [s]")->check(CLI::PositiveNumber);
    c->add_option("--seed", req.seed, "Measurement noise seed");
    c->add_option("--noise", req.noise_std, "Measurement noise standard deviation")
        ->check(CLI::NonNegativeNumber);
    c->add_option("--log-every", req.log_every, "Integrator steps per logged sample")
        ->check(CLI::PositiveNumber);
    c->add_option("--p", o.p, "Decay exponent for the J bound check");
    c->add_option("--out", out, "Output directory");
    c->add_flag("--diagnostics", req.diagnostics, "Also write the filter internals CSV");
  };

  auto* run = app.add_subcommand("run", "Simulate a scenario and write CSV + JSON");
  add_common(run);
  run->add_option("--omega", o.omega, "Base dither frequency [rad/s]")->check(CLI::PositiveNumber);
  run->add_option("--lambda", o.lambda, "Adaptation gain")->check(CLI::PositiveNumber);

  std::vector<double> omegas, lambdas;
  auto* sw = app.add_subcommand("sweep", "Run a scenario over several omega or lambda values");
  add_common(sw);
  sw->add_option("--omega", omegas, "Comma-separated omega values")->delimiter(',');
  sw->add_option("--lambda", lambdas, "Comma-separated lambda values")->delimiter(',');

  std::string csv;
  double p = 1.05;
  double t_min = 1.0;
  std::string source = "estimated";
  auto* cb = app.add_subcommand("check-bound", "Check |J(t)| <= 1/t^p on a trajectory CSV");
  cb->add_option("csv", csv, "Trajectory CSV")->required();
  cb->add_option("--p", p, "Decay exponent (> 1)");
  cb->add_option("--t-min", t_min, "Ignore samples before this time [s]");
  cb->add_option("--source", source, "estimated | exact");
  cb->add_option("--out", out_file, "Also write the JSON result here");

  std::string agent;
  std::size_t samples = 2000;
  auto* b2 = app.add_subcommand("check-b2", "Check the vanishing-oscillation bound at x*");
  b2->add_option("scenario", target, "Preset name or scenario JSON file")->required();
  b2->add_option("--agent", agent, "Agent name (default: the scenario's primary agent)");
  b2->add_option("--samples", samples, "Domain samples for the feasibility probe");
  b2->add_option("--out", out_file, "Also write the JSON result here");

  std::string base_csv, prop_csv;
  std::vector<double> x_star;
  double window = 10.0;
  auto* cmp = app.add_subcommand("compare", "Compare a baseline and a proposed trajectory CSV");
  cmp->add_option("baseline", base_csv, "Baseline CSV")->required();
  cmp->add_option("proposed", prop_csv, "Proposed CSV")->required();
  cmp->add_option("--scenario", target, "Scenario providing x*");
  cmp->add_option("--xstar", x_star, "Comma-separated extremum")->delimiter(',');
  cmp->add_option("--window", window, "Envelope window [s]");
  cmp->add_option("--p", p, "Decay exponent for the J bound check");
  cmp->add_option("--t-min", t_min, "Bound check start time [s]");
  cmp->add_option("--out", out_file, "Also write the JSON result here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*list) return cmd_list();
    if (*run) return cmd_run(target, o, mode, req, out);
    if (*sw) return cmd_sweep(target, o, omegas, lambdas, mode, req, out);
    if (*cb) return cmd_check_bound(csv, p, t_min, source, out_file);
    if (*b2) return cmd_check_b2(target, agent, samples, out_file);
    if (*cmp) return cmd_compare(base_csv, prop_csv, target, x_star, window, p, t_min, out_file);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const lbesc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const lbesc::LookupError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const lbesc::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
