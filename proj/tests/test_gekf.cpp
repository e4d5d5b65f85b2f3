#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lbesc/analysis/metrics.hpp"
#include "lbesc/gekf/gekf.hpp"
#include "lbesc/scenarios/scenario.hpp"
#include "lbesc/sim/runners.hpp"
#include "oracles.hpp"

using namespace lbesc;
using presets::vec;

namespace {

GekfState state_1d(double x1, double x2, double x3) {
  GekfConfig cfg;
  auto s = GekfState::initial(1, cfg, x3);
  s.mean[0] = x1;
  s.mean[1] = x2;
  return s;
}

std::vector<ChannelModel> case1_models() {
  const auto spec = preset("case1").system(0);
  return channel_models(spec, GekfConfig{}, nu_hats(spec));
}

}  // namespace

TEST(Propagate, ZeroRateKeepsMean) {
  const auto s = state_1d(2.0, 0.0, 5.0);
  const auto out = propagate(s, GekfConfig{}, 0.1);
  EXPECT_DOUBLE_EQ(out.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(out.mean[2], 5.0);
  EXPECT_DOUBLE_EQ(out.t, 0.1);
}

TEST(Propagate, LinearInRate) {
  const auto out = propagate(state_1d(2.0, 1.0, 0.0), GekfConfig{}, 0.5);
  EXPECT_DOUBLE_EQ(out.mean[0], 2.5);
}

TEST(Propagate, CovarianceMatchesDenseProduct) {
  GekfConfig cfg;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  auto s = GekfState::initial(2, cfg, 0.0);
  Matrix A(5, 5);
  for (Eigen::Index i = 0; i < 25; ++i) A.data()[i] = g(rng);
  s.P = A * A.transpose();
  const double dt = 0.03;
  Matrix Phi = Matrix::Identity(5, 5);
  Phi(0, 2) = dt;
  Phi(1, 3) = dt;
  Matrix Q = Matrix::Zero(5, 5);
  Q.diagonal() << cfg.q1, cfg.q1, cfg.q2, cfg.q2, cfg.q3;
  const Matrix expected = Phi * s.P * Phi.transpose() + Q * dt;
  EXPECT_LT((propagate(s, cfg, dt).P - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Propagate, NoProcessNoiseKeepsPsd) {
  GekfConfig cfg;
  cfg.q1 = cfg.q2 = cfg.q3 = 0.0;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  auto s = GekfState::initial(3, cfg, 0.0);
  Matrix A(7, 3);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = g(rng);
  s.P = A * A.transpose();  // rank deficient
  for (int k = 0; k < 500; ++k) {
    s = propagate(s, cfg, 0.01);
    ASSERT_GE(min_eigenvalue(s.P), -1e-9);
    ASSERT_LT((s.P - s.P.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Propagate, NonFiniteIsFilterDivergence) {
  auto s = state_1d(1.0, std::numeric_limits<double>::infinity(), 0.0);
  EXPECT_THROW(propagate(s, GekfConfig{}, 0.1), FilterDivergenceError);
}

TEST(Update, ZeroInnovationLeavesMean) {
  GekfConfig cfg;
  auto s = state_1d(-0.5, 0.1, 2.0);
  const auto models = case1_models();
  const Vector U1 = vec({0.02});
  const Vector U2 = vec({-0.01});
  const Vector a = vec({1.0});
  const double f1 = 2.0;
  const double c = -(f1 * U1[0] + 1.0 * U2[0]) / (0.5 * 1.0 * 1.0);
  const double y = s.mean[2] + c * s.mean[0];
  const auto r = measurement_update(s, cfg, y, f1, U1, U2, a, models);
  EXPECT_NEAR(r.innovation, 0.0, 1e-12);
  EXPECT_NEAR(r.state.mean[0], -0.5, 1e-15);
  EXPECT_NEAR(r.state.mean[1], 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(r.state.mean[2], y);
  EXPECT_LE(r.state.P.trace(), s.P.trace());
  EXPECT_NEAR(r.regressor[0], c, 1e-12);
}

TEST(Update, HugeMeasurementNoiseCarriesNoInformation) {
  GekfConfig cfg;
  cfg.r = 1e12;
  auto s = state_1d(0.3, 0.0, 1.0);
  const auto r = measurement_update(s, cfg, 5.0, 1.0, vec({0.05}), vec({0.05}), vec({1.0}),
                                    case1_models());
  EXPECT_LT((r.state.mean.head(2) - s.mean.head(2)).norm(), 1e-6);
}

TEST(Update, BelowAmplitudeFloorDecays) {
  GekfConfig cfg;
  auto s = state_1d(0.4, 0.2, 1.0);
  const auto r = measurement_update(s, cfg, 1.0, 1.0, vec({0.05}), vec({0.05}), vec({1e-5}),
                                    case1_models());
  EXPECT_EQ(r.status[0], ChannelStatus::below_floor);
  EXPECT_DOUBLE_EQ(r.state.mean[0], 0.4 * cfg.floor_decay);
  EXPECT_DOUBLE_EQ(r.state.mean[1], 0.0);
}

TEST(Update, SingularGeometrySkipsChannel) {
  auto spec = preset("case1").system(0);
  spec.channels[0].b1 = FieldElement::constant(1.0);
  GekfConfig cfg;
  const auto models = channel_models(spec, cfg, nu_hats(spec));
  const auto r = measurement_update(state_1d(0.4, 0.0, 1.0), cfg, 1.5, 1.0, vec({0.05}),
                                    vec({0.05}), vec({1.0}), models);
  EXPECT_EQ(r.status[0], ChannelStatus::singular_geometry);
  EXPECT_DOUBLE_EQ(r.state.mean[0], 0.4);
}

TEST(Update, JosephFormStaysSymmetricPsd) {
  GekfConfig cfg;
  const auto models = case1_models();
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  auto s = state_1d(0.0, 0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    s = propagate(s, cfg, 0.01);
    s = measurement_update(s, cfg, 1.0 + 0.1 * g(rng), 1.0, vec({0.1 * g(rng)}),
                           vec({0.1 * g(rng)}), vec({1.0}), models)
            .state;
    ASSERT_GE(min_eigenvalue(s.P), -1e-9);
    ASSERT_LT((s.P - s.P.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ExtractJ, SmoothingOffReturnsEstimate) {
  GekfConfig cfg;
  cfg.smoothing = false;
  EstimateHistory h(8);
  h.push(vec({5.0}));
  const auto s = state_1d(1.25, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(extract_J(s, cfg, h).values[0], 1.25);
}

TEST(ExtractJ, ConstantHistory) {
  EstimateHistory h(16);
  for (int k = 0; k < 40; ++k) h.push(vec({0.75}));
  EXPECT_DOUBLE_EQ(extract_J(state_1d(0, 0, 0), GekfConfig{}, h).values[0], 0.75);
}

TEST(ExtractJ, SinusoidOverOnePeriodAveragesOut) {
  EstimateHistory h(64);
  for (int k = 0; k < 64 * 40 + 17; ++k) {
    h.push(vec({std::sin(oracle::kTwoPi * k / 64.0)}));
  }
  EXPECT_NEAR(extract_J(state_1d(0, 0, 0), GekfConfig{}, h).values[0], 0.0, 1e-6);
}

TEST(Gekf, EstimateShrinksAtPinnedExtremum) {
  const auto sc = preset("case1");
  const auto spec = sc.system(0);
  const auto& cfg = sc.gekf;
  const auto models = channel_models(spec, cfg, nu_hats(spec));
  const double fstar = spec.objective.seek_value(*spec.objective.extremum());
  auto s = GekfState::initial(1, cfg, fstar);
  s.mean[0] = 1.0;
  EstimateHistory history(spec.steps_per_period());
  const double w = spec.omega;
  double initial = -1.0;
  double t = 0.0;
  for (std::size_t k = 1; k <= 10 * spec.steps_per_period(); ++k) {
    const double t2 = spec.dt * static_cast<double>(k);
    const Vector U1 = Vector::Constant(1, oracle::U_cos(1.0, w, t, t2));
    const Vector U2 = Vector::Constant(1, oracle::U_sin(1.0, w, t, t2));
    s = propagate(s, cfg, spec.dt);
    s = measurement_update(s, cfg, fstar, fstar, U1, U2, vec({1.0}), models).state;
    history.push(s.estimate());
    if (initial < 0.0 && k == spec.steps_per_period()) {
      initial = std::abs(extract_J(s, cfg, history).values[0]);
    }
    t = t2;
  }
  EXPECT_LT(std::abs(extract_J(s, cfg, history).values[0]), initial);
}

TEST(Gekf, CaseOneTracksOracleAfterTransient) {
  const auto sc = preset("case1");
  const auto spec = sc.system(0);
  const auto log = run_proposed(spec, sc.gekf);
  const double t_from = 20.0 * spec.base_period();
  const auto q = estimation_quality(log, t_from);
  EXPECT_LE(q.median_relative_error[0], 0.3);
  EXPECT_LT(q.eta_last_quarter[0], q.eta_first_quarter[0]);
  EXPECT_TRUE(std::isfinite(q.eta_sup[0]));
  for (const auto& smp : log.samples) {
    ASSERT_TRUE(smp.gekf);
    ASSERT_GE(smp.gekf->min_eig_p, -1e-9);
    ASSERT_LE(smp.gekf->asymmetry_p, 1e-10);
  }
}

TEST(GekfConfig, ValidateRejectsNonPositive) {
  GekfConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.r = 0.0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = {};
  cfg.a_floor_ratio = 0.0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = {};
  cfg.measurement_every = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
}
