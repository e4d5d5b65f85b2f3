#include <cmath>
#include <cstdio>

#include "lbesc/analysis/metrics.hpp"
#include "lbesc/sim/runners.hpp"

// Quartic-plus-quadratic bowl with its minimum at x = 0.5.
int main() {
  using namespace lbesc;

  auto f = [](const Vector& x) {
    const double e = x[0] - 0.5;
    return 2.0 * e * e + 0.3 * e * e * e * e;
  };
  auto grad = [](const Vector& x) {
    const double e = x[0] - 0.5;
    Vector g(1);
    g[0] = 4.0 * e + 1.2 * e * e * e;
    return g;
  };
  Vector x_star(1);
  x_star << 0.5;

  EscSystemSpec spec;
  spec.objective = ObjectiveMap::custom(1, f, grad, ExtremumKind::minimum, x_star, 0.0);
  spec.domain = DomainBox::symmetric(1, 5.0);
  spec.channels = {ChannelSpec{}};
  spec.omega = 8.0;
  spec.a0 = Vector::Constant(1, 1.0);
  spec.lambda = Vector::Constant(1, 0.1);
  spec.x0 = Vector::Constant(1, 1.25);
  spec.horizon = 100.0;
  spec.dt = kTwoPi / spec.omega / 64.0;

  GekfConfig cfg;
  cfg.q1 = 0.1;
  cfg.q2 = 10.0;

  const TrajectoryLog log = run_proposed(spec, cfg);
  for (double t : {0.0, 10.0, 25.0, 50.0, 100.0}) {
    const auto k = static_cast<std::size_t>(std::llround(t / log.stride));
    const auto& s = log.samples[std::min(k, log.size() - 1)];
    std::printf("t = %6.1f  x = %8.5f  a = %.3e\n", s.t, s.x[0], s.a[0]);
  }
  const RunMetrics m = metrics(log, x_star, 10.0);
  std::printf("final error %.4f\n", m.final_error);
  return 0;
}
