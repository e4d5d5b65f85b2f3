#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lbesc/analysis/b2.hpp"
#include "lbesc/analysis/bound_check.hpp"
#include "lbesc/analysis/metrics.hpp"
#include "lbesc/scenarios/scenario.hpp"
#include "oracles.hpp"

using namespace lbesc;
using presets::vec;

namespace {

std::vector<double> grid(double t0, double t1, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = t0 + (t1 - t0) * k / static_cast<double>(n - 1);
  return t;
}

TrajectoryLog synthetic(std::function<double(double)> x, double horizon = 50.0,
                        double stride = 0.01) {
  TrajectoryLog log;
  log.dimension = 1;
  log.stride = stride;
  log.samples_per_period = 1;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / stride));
  for (std::size_t k = 0; k <= steps; ++k) {
    TrajectorySample s;
    s.t = stride * static_cast<double>(k);
    s.x = vec({x(s.t)});
    s.a = vec({1.0});
    log.samples.push_back(s);
  }
  return log;
}

}  // namespace

TEST(BoundCheck, PowerLawUnderBound) {
  const auto t = grid(0.1, 100.0, 5000);
  std::vector<double> J;
  for (double v : t) J.push_back(std::pow(v, -1.1));
  const auto r = check_bound(t, J, 1.05, 1.0);
  EXPECT_TRUE(r.holds);
  ASSERT_TRUE(r.t_star);
  EXPECT_NEAR(*r.t_star, 1.0, 0.03);
  EXPECT_GE(*r.t_star, 1.0);
  EXPECT_EQ(r.violations_total, 0u);
}

TEST(BoundCheck, ConstantFails) {
  const auto t = grid(0.0, 100.0, 2001);
  const std::vector<double> J(t.size(), 0.5);
  const auto r = check_bound(t, J, 1.05, 1.0);
  EXPECT_FALSE(r.holds);
  EXPECT_FALSE(r.t_star);
  ASSERT_TRUE(r.last_violation);
  EXPECT_DOUBLE_EQ(*r.last_violation, 100.0);
}

TEST(BoundCheck, LateSpikeMovesTStar) {
  const auto t = grid(0.0, 100.0, 1001);
  std::vector<double> J(t.size(), 0.0);
  J[400] = 1.0;  // t = 40
  const auto r = check_bound(t, J, 1.05);
  ASSERT_TRUE(r.t_star);
  EXPECT_NEAR(*r.t_star, 40.1, 1e-9);
  EXPECT_EQ(r.violations_total, 1u);
  EXPECT_EQ(r.violations_after_t_star, 0u);
}

TEST(BoundCheck, InputErrors) {
  const std::vector<double> none;
  EXPECT_THROW(check_bound(none, none, 1.05), InputError);
  const std::vector<double> t = {1.0, 2.0};
  const std::vector<double> j = {0.1};
  EXPECT_THROW(check_bound(t, j, 1.05), InputError);
  const std::vector<double> j2 = {0.1, 0.1};
  EXPECT_THROW(check_bound(t, j2, 1.0), InputError);
  EXPECT_THROW(check_bound(t, j2, 1.05, 0.0), InputError);
  const std::vector<double> back = {2.0, 1.0};
  EXPECT_THROW(check_bound(back, j2, 1.05), InputError);
}

TEST(BoundCheck, MonotoneInExponent) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto t = grid(0.0, 60.0, 601);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> J;
    const double decay = 1.0 + u(rng);
    for (double v : t) J.push_back(0.8 * u(rng) / std::pow(1.0 + v, decay));
    const double p = 1.0 + 0.5 * u(rng) + 1e-3;
    const auto r = check_bound(t, J, p, 1.0);
    if (!r.holds) continue;
    const double q = 1.0 + (p - 1.0) * u(rng) + 1e-6;
    const auto r2 = check_bound(t, J, q, 1.0);
    ASSERT_TRUE(r2.holds);
    ASSERT_LE(*r2.t_star, *r.t_star);
  }
}

TEST(B2, CaseThreeVehicleThreeContradiction) {
  const auto spec = preset("case3").system(2);
  const auto r = check_b2(spec);
  EXPECT_TRUE(r.contradiction());
  EXPECT_NEAR(r.extremum_value, 10.0, 0.0);
  EXPECT_NEAR(r.shifted_at_extremum, 0.0, 1e-12);
  for (const auto& e : r.elements) {
    const bool constant = e.element.label == "b_21" || e.element.label == "b_12";
    EXPECT_EQ(e.contradiction, constant) << e.element.label;
    if (constant) EXPECT_NEAR(std::abs(e.value_at_extremum), 0.3, 1e-15);
  }
}

TEST(B2, VanishingElementIsFine) {
  const auto spec = preset("case1").system(0);
  std::vector<B2Element> els = {{"b_11", 1, 1, FieldElement::affine(1.0)}};
  const auto r = check_b2(els, spec.objective, spec.domain);
  EXPECT_FALSE(r.contradiction());
  ASSERT_TRUE(r.elements[0].fitted_m3);
  EXPECT_NEAR(*r.elements[0].fitted_m3, 1.0, 1e-9);
  EXPECT_NEAR(*r.elements[0].required_m, 1.0, 1e-9);
}

TEST(B2, CaseOneFlagsConstantElement) {
  const auto r = check_b2(preset("case1").system(0));
  ASSERT_EQ(r.elements.size(), 2u);
  EXPECT_FALSE(r.elements[0].contradiction);
  EXPECT_TRUE(r.elements[1].contradiction);
  EXPECT_EQ(r.elements[1].element.label, "b_21");
}

TEST(B2, NeverFlagsElementsVanishingAtZero) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto obj = ObjectiveMap::quadratic(vec({1.0, 2.0}), vec({0.5, -0.5}), 4.0,
                                           ExtremumKind::minimum);
  const auto box = DomainBox::symmetric(2, 2.0);
  for (int k = 0; k < 30; ++k) {
    std::vector<B2Element> els = {{"a", 1, 1, FieldElement::affine(u(rng))},
                                  {"s", 2, 1, FieldElement::sine(u(rng), u(rng))}};
    EXPECT_FALSE(check_b2(els, obj, box, 200).contradiction());
  }
}

TEST(B2, NeedsExtremumMetadata) {
  const auto obj = ObjectiveMap::custom(1, [](const Vector& x) { return x[0]; });
  std::vector<B2Element> els = {{"a", 1, 1, FieldElement::constant(1.0)}};
  EXPECT_THROW(check_b2(els, obj, DomainBox::symmetric(1, 1.0)), CapabilityError);
}

TEST(Metrics, ConstantAtExtremum) {
  const auto log = synthetic([](double) { return 1.0; });
  const auto m = metrics(log, vec({1.0}), 10.0);
  EXPECT_DOUBLE_EQ(m.final_error, 0.0);
  EXPECT_DOUBLE_EQ(m.envelope_max, 0.0);
}

TEST(Metrics, SinusoidEnvelope) {
  const double A = 0.37;
  const auto log = synthetic([&](double t) { return 1.0 + A * std::sin(3.1 * t); });
  const auto m = metrics(log, vec({1.0}), 10.0);
  EXPECT_NEAR(m.envelope_max, A, 0.02 * A);
}

TEST(Metrics, EnvelopeInvariantToOffset) {
  auto f = [](double t) { return std::exp(-0.1 * t) + 0.2 * std::cos(5.0 * t); };
  const auto a = metrics(synthetic(f), vec({0.0}), 10.0);
  const auto b = metrics(synthetic([&](double t) { return f(t) + 3.5; }), vec({0.0}), 10.0);
  EXPECT_NEAR(a.envelope_max, b.envelope_max, 1e-12);
}

TEST(Metrics, SettlingOnExponential) {
  const auto log = synthetic([](double t) { return 1.0 + std::exp(-t); });
  const auto m = metrics(log, vec({1.0}), 10.0);
  ASSERT_TRUE(m.settling_time);
  EXPECT_NEAR(*m.settling_time, std::log(20.0), 0.011);
}

TEST(Compare, IdenticalLogs) {
  const auto log = synthetic([](double t) { return std::sin(t); });
  const auto r = compare(log, log, vec({0.0}));
  ASSERT_TRUE(r.envelope_ratio);
  EXPECT_DOUBLE_EQ(*r.envelope_ratio, 1.0);
}

TEST(Compare, FlatProposed) {
  const auto base = synthetic([](double t) { return std::sin(t); });
  const auto prop = synthetic([](double) { return 0.0; });
  EXPECT_DOUBLE_EQ(*compare(base, prop, vec({0.0})).envelope_ratio, 0.0);
}

TEST(Compare, StrideMismatch) {
  const auto a = synthetic([](double) { return 0.0; }, 10.0, 0.01);
  const auto b = synthetic([](double) { return 0.0; }, 20.0, 0.02);
  EXPECT_THROW(compare(a, b, vec({0.0})), InputError);
}

TEST(Compare, SerializesStableFields) {
  const auto base = synthetic([](double t) { return std::sin(t); });
  const auto j = to_json(compare(base, base, vec({0.0})));
  for (const char* key : {"baseline", "proposed", "envelope_ratio", "bound_check"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(j["baseline"].contains("settling_time"));
}
