#include <cstdio>

#include "lbesc/analysis/bound_check.hpp"
#include "lbesc/analysis/metrics.hpp"
#include "lbesc/scenarios/scenario.hpp"
#include "lbesc/sim/runners.hpp"

int main() {
  using namespace lbesc;

  const Scenario sc = preset("case1");
  const EscSystemSpec spec = sc.system(0);
  const Vector x_star = *spec.objective.extremum();

  const TrajectoryLog baseline = run_baseline(spec);
  const TrajectoryLog proposed = run_proposed(spec, sc.gekf);

  const RunMetrics mb = metrics(baseline, x_star, sc.analysis.window);
  const RunMetrics mp = metrics(proposed, x_star, sc.analysis.window);
  std::printf("baseline  final error %.4f  envelope %.4f\n", mb.final_error, mb.envelope_max);
  std::printf("proposed  final error %.4f  envelope %.2e  a(end) %.2e\n", mp.final_error,
              mp.envelope_max, proposed.back().a[0]);

  for (const auto& r : check_bound(proposed, sc.analysis.p, sc.analysis.t_min)) {
    if (r.t_star) {
      std::printf("|J| <= 1/t^%.2f from t = %.3f s\n", r.p, *r.t_star);
    } else {
      std::printf("|J| bound still violated at the end of the run\n");
    }
  }
  return 0;
}
