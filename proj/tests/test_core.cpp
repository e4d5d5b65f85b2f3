#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lbesc/core/dither.hpp"
#include "lbesc/core/objective.hpp"
#include "lbesc/core/system.hpp"
#include "lbesc/scenarios/scenario.hpp"
#include "oracles.hpp"

using namespace lbesc;

namespace {

constexpr double kPi = std::numbers::pi;

DitherSignal random_zero_mean(std::mt19937_64& rng, std::size_t count) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(count);
  double mean = 0.0;
  for (auto& x : v) {
    x = g(rng);
    mean += x;
  }
  mean /= static_cast<double>(count);
  double sup = 0.0;
  for (auto& x : v) {
    x -= mean;
    sup = std::max(sup, std::abs(x));
  }
  return DitherSignal::tabulated_uniform(v, kTwoPi, sup + 1e-9);
}

}  // namespace

TEST(Dither, CosineAndSineValues) {
  EXPECT_DOUBLE_EQ(eval_dither(DitherSignal::cosine(), 0.0), 1.0);
  EXPECT_NEAR(eval_dither(DitherSignal::sine(), kPi / 2), 1.0, 1e-15);
  EXPECT_NEAR(eval_dither(DitherSignal::cosine(), 2 * kPi + 0.3), std::cos(0.3), 1e-14);
}

TEST(Dither, PhaseAndPeriodScaling) {
  const auto d = DitherSignal::sine(0.25, 4.0);
  EXPECT_NEAR(d(1.0), std::sin(kTwoPi / 4.0 + 0.25), 1e-14);
  EXPECT_NEAR(d(5.0), d(1.0), 1e-12);
}

TEST(Dither, TabulatedInterpolatesAndWraps) {
  const auto d = DitherSignal::tabulated({{0.0, 1.0}, {1.0, -1.0}}, 2.0);
  EXPECT_DOUBLE_EQ(d(0.5), 0.0);
  EXPECT_DOUBLE_EQ(d(1.5), 0.0);
  EXPECT_DOUBLE_EQ(d(2.0), 1.0);
  EXPECT_DOUBLE_EQ(d(-0.5), 0.0);
}

TEST(Dither, TabulatedRejectsBadSamples) {
  EXPECT_THROW(DitherSignal::tabulated({}), ConfigError);
  EXPECT_THROW(DitherSignal::tabulated({{0.0, 1.0}, {0.0, 2.0}}), ConfigError);
  EXPECT_THROW(DitherSignal::tabulated({{7.0, 1.0}}), ConfigError);
  EXPECT_THROW(DitherSignal::cosine(0.0, -1.0), ConfigError);
}

TEST(Dither, AssumptionReportCosine) {
  const auto r = verify_assumption_a2(DitherSignal::cosine());
  EXPECT_TRUE(r.periodic);
  EXPECT_TRUE(r.zero_mean);
  EXPECT_TRUE(r.bounded);
  EXPECT_TRUE(r.ok());
}

TEST(Dither, AssumptionReportConstantHasMean) {
  const auto r = verify_assumption_a2(DitherSignal::tabulated({{0.0, 1.0}}));
  EXPECT_FALSE(r.zero_mean);
  EXPECT_NEAR(r.mean, 1.0, 1e-12);
}

TEST(Dither, AssumptionReportBoundTooSmall) {
  const auto r = verify_assumption_a2(DitherSignal::sine(0.0, kTwoPi, 0.5));
  EXPECT_FALSE(r.bounded);
  EXPECT_TRUE(r.zero_mean);
}

TEST(Nu, SinCos) {
  EXPECT_NEAR(nu_coefficient(DitherSignal::sine(), DitherSignal::cosine()), 0.5, 1e-10);
  EXPECT_NEAR(nu_coefficient(DitherSignal::cosine(), DitherSignal::sine()), -0.5, 1e-10);
  EXPECT_NEAR(nu_coefficient(DitherSignal::cosine(), DitherSignal::cosine()), 0.0, 1e-10);
}

TEST(Nu, MatchesClosedFormWithPhases) {
  for (double pj : {0.0, 0.4, 1.3}) {
    for (double pi : {0.0, -0.7, 2.1}) {
      const double got = nu_coefficient(DitherSignal::sine(pj), DitherSignal::cosine(pi));
      EXPECT_NEAR(got, oracle::nu_sin_cos(pj, pi), 1e-9) << pj << " " << pi;
    }
  }
}

TEST(Nu, AntisymmetryOnRandomTabulatedPairs) {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 20; ++k) {
    const auto a = random_zero_mean(rng, 16);
    const auto b = random_zero_mean(rng, 32);
    const double ab = nu_coefficient(a, b);
    const double ba = nu_coefficient(b, a);
    EXPECT_NEAR(ab + ba, 0.0, 1e-8);
    const double ref = oracle::nu_trapezoid([&](double t) { return a(t); },
                                            [&](double t) { return b(t); });
    EXPECT_NEAR(ab, ref, 1e-6);
  }
}

TEST(Nu, NodeDoublingConverges) {
  const auto u = DitherSignal::sine(0.3);
  const auto v = DitherSignal::cosine(-0.2);
  const double coarse = nu_coefficient(u, v, 4096);
  const double fine = nu_coefficient(u, v, 8192);
  EXPECT_LT(std::abs(coarse - fine), 1e-9);
}

TEST(Nu, RejectsNonZeroMeanAndPeriodMismatch) {
  EXPECT_THROW(nu_coefficient(DitherSignal::tabulated({{0.0, 1.0}}), DitherSignal::cosine()),
               ConfigError);
  EXPECT_THROW(nu_coefficient(DitherSignal::sine(0.0, 1.0), DitherSignal::cosine()),
               ConfigError);
}

TEST(B0, CaseChannels) {
  ChannelSpec c1;
  c1.b1 = FieldElement::affine(1.0);
  c1.b2 = FieldElement::constant(1.0);
  ChannelSpec c2;
  c2.b1 = FieldElement::cosine(1.0, 2.0);
  c2.b2 = FieldElement::sine(-1.0, 2.0);
  ChannelSpec flat;
  flat.b1 = FieldElement::constant(0.3);
  flat.b2 = FieldElement::constant(-2.0);
  for (double f : {-3.0, 0.0, 0.7, 12.0}) {
    EXPECT_DOUBLE_EQ(b0_of(c1, f), 1.0);
    EXPECT_NEAR(b0_of(c2, f), 2.0, 1e-14);
    EXPECT_DOUBLE_EQ(b0_of(flat, f), 0.0);
  }
}

TEST(B0, AnalyticMatchesFiniteDifference) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uf(-5.0, 5.0);
  std::uniform_real_distribution<double> ug(-2.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    ChannelSpec c;
    c.b1 = FieldElement::sine(ug(rng), ug(rng));
    c.b2 = FieldElement::affine(ug(rng), ug(rng));
    const double f = uf(rng);
    const double exact = b0_of(c, f);
    const double fd = b0_of(c, f, DerivativeMode::finite_difference);
    EXPECT_NEAR(fd, exact, 1e-5 * std::max(1.0, std::abs(exact)));
  }
}

TEST(B0, CustomWithoutDerivativeFallsBack) {
  ChannelSpec c;
  c.b1 = FieldElement::custom([](double f) { return f * f; });
  c.b2 = FieldElement::constant(1.0);
  EXPECT_NEAR(b0_of(c, 1.5), 3.0, 1e-6);
  c.b1 = FieldElement::custom([](double f) { return std::log(f); });
  EXPECT_THROW(b0_of(c, -1.0), EvaluationError);
}

TEST(Objective, QuadraticAndSeekSignal) {
  const auto m = ObjectiveMap::quadratic(presets::vec({-0.5, -1.5}), presets::vec({-1.0, 1.0}), 10.0,
                                         ExtremumKind::maximum);
  const Vector x = presets::vec({0.0, 0.0});
  EXPECT_DOUBLE_EQ(m(x), 10.0 - 0.5 - 1.5);
  EXPECT_DOUBLE_EQ(m.seek_value(x), 2.0);
  EXPECT_DOUBLE_EQ(m.shifted(x), -2.0);
  const Vector g = m.seek_gradient(x);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], -3.0);
  EXPECT_THROW(m(presets::vec({1.0})), ConfigError);
}

TEST(Objective, CustomWithoutGradient) {
  const auto m = ObjectiveMap::custom(1, [](const Vector& x) { return x[0] * x[0]; });
  EXPECT_FALSE(m.has_gradient());
  EXPECT_THROW(m.gradient(presets::vec({1.0})), CapabilityError);
  EXPECT_THROW(m.shifted(presets::vec({1.0})), CapabilityError);
}

TEST(Objective, PresetGradientsVanishAtExtremum) {
  for (const auto& name : preset_names()) {
    const auto sc = preset(name);
    for (const auto& ag : sc.agents) {
      ASSERT_TRUE(ag.objective.extremum());
      EXPECT_LE(ag.objective.gradient(*ag.objective.extremum()).norm(), 1e-8) << name;
      EXPECT_TRUE(ag.domain.contains(*ag.objective.extremum()));
    }
  }
}

TEST(System, ValidateRejectsBadSpecs) {
  auto spec = preset("case1").system(0);
  EXPECT_NO_THROW(validate(spec));
  auto bad = spec;
  bad.omega = 0.0;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = spec;
  bad.lambda[0] = -0.1;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = spec;
  bad.dt = spec.shortest_period() / 16.0;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = spec;
  bad.horizon = spec.dt / 2;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = spec;
  bad.x0 = presets::vec({1.0, 2.0});
  EXPECT_THROW(validate(bad), ConfigError);
}

TEST(System, DefaultStepResolvesFastestChannel) {
  const auto spec = preset("case3").system(2);
  EXPECT_NEAR(spec.omega, 30.0, 1e-12);
  EXPECT_NEAR(spec.dt, kTwoPi / 60.0 / 64.0, 1e-15);
  EXPECT_EQ(spec.steps_per_period(), 128u);
}

TEST(ErrorModel, InverseSquareSatisfiesAssumption) {
  const auto m = EstimationErrorModel::inverse_square(0.1);
  EXPECT_DOUBLE_EQ(m(0.0), 0.1);
  EXPECT_TRUE(verify_error_model(m).ok());
  EXPECT_TRUE(verify_error_model(EstimationErrorModel::exponential(0.2, 0.5)).ok());
}

TEST(ErrorModel, ViolationsAreReported) {
  auto m = EstimationErrorModel::inverse_square(0.1);
  m.theta0 = 0.01;
  EXPECT_FALSE(verify_error_model(m).lipschitz);
  const auto slow = EstimationErrorModel::exponential(0.1, 0.01);
  EXPECT_FALSE(verify_error_model(slow).decays);
}
