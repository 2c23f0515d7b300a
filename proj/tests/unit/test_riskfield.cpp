#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "riskplan/riskfield.hpp"

using namespace riskplan;

namespace {

Obstacle walker(Vec2 mu, Vec2 v, double weight = 3.0) {
  Obstacle o;
  o.id = 7;
  o.cls = ObstacleClass::ContinuouslyDynamic;
  o.mu = mu;
  o.velocity = v;
  o.semantic_weight = weight;
  return o;
}

}  // namespace

TEST(StaticRisk, PeakValueUsesTheThreeHalvesNormalizer) {
  Obstacle o;
  o.mu = {2.0, 3.0};
  o.sigma_x = 1.5;
  o.sigma_y = 0.5;
  o.semantic_weight = 2.0;
  const double expected = 2.0 * std::pow(2.0 * M_PI, -1.5) / (1.5 * 0.5);
  EXPECT_NEAR(static_risk(o.mu, o).value, expected, 1e-15);
  EXPECT_NEAR(static_risk(o.mu, o).gradient.norm(), 0.0, 1e-15);
}

TEST(StaticRisk, FallsOffFasterAlongTheNarrowAxis) {
  Obstacle o;
  o.sigma_x = 2.0;
  o.sigma_y = 0.5;
  EXPECT_GT(static_risk({1.0, 0.0}, o).value, static_risk({0.0, 1.0}, o).value);
}

TEST(StaticRisk, GradientMatchesCentralDifferences) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Obstacle o = oracle::random_obstacle(rng, 1, false);
    const Vec2 p = o.mu + Vec2(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5));
    const RiskSample s = static_risk(p, o);
    const Vec2 fd = oracle::central_gradient([&](const Vec2& q) { return static_risk(q, o).value; }, p, 1e-5);
    EXPECT_LT(oracle::relative_error(s.gradient, fd, 1e-3 * s.value), 1e-6);
  }
}

TEST(CornerRisk, OnlyStructuresWithACornerWeightContribute) {
  Obstacle o;
  o.sigma_x = 3.0;
  o.sigma_y = 2.0;
  EXPECT_EQ(corner_risk({3.0, 2.0}, o).value, 0.0);
  o.corner_weight = 2.0;
  const RiskSample at_corner = corner_risk({3.0, 2.0}, o);
  EXPECT_GT(at_corner.value, 0.0);
  const Vec2 p(2.2, 3.1);
  const Vec2 fd = oracle::central_gradient([&](const Vec2& q) { return corner_risk(q, o).value; }, p, 1e-5);
  EXPECT_LT(oracle::relative_error(corner_risk(p, o).gradient, fd, 1e-12), 1e-6);
}

TEST(DynamicRisk, ThrowsAtTheCenter) {
  const Obstacle o = walker({1.0, 1.0}, {1.0, 0.0});
  EXPECT_THROW(dynamic_risk(o.mu, o, 1.0), SingularityError);
}

TEST(DynamicRisk, InverseSquareWithoutVelocityWeight) {
  const Obstacle o = walker({0.0, 0.0}, {1.0, 0.0}, 2.0);
  EXPECT_NEAR(dynamic_risk({2.0, 0.0}, o, 0.0).value, 2.0 / 4.0, 1e-15);
  EXPECT_NEAR(dynamic_risk({0.0, -2.0}, o, 0.0).value, 2.0 / 4.0, 1e-15);
}

TEST(DynamicRisk, ExactGradientMatchesCentralDifferences) {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const Obstacle o = oracle::random_obstacle(rng, 1, true);
    const double k1 = rng.uniform(0.0, 2.0);
    const double r = rng.uniform(0.5, 6.0), a = rng.uniform(-M_PI, M_PI);
    const Vec2 p = o.mu + r * Vec2(std::cos(a), std::sin(a));
    const Vec2 fd =
        oracle::central_gradient([&](const Vec2& q) { return dynamic_risk(q, o, k1).value; }, p, 1e-6 * r);
    EXPECT_LT(oracle::relative_error(dynamic_risk(p, o, k1).gradient, fd, 1e-12), 1e-6);
  }
}

TEST(DynamicRisk, PrintedGradientDiffersOffTheVelocityLine) {
  const Obstacle o = walker({0.0, 0.0}, {1.0, 0.0});
  const Vec2 p(1.0, 1.0);
  EXPECT_GT((dynamic_risk(p, o, 1.0, true).gradient - dynamic_risk(p, o, 1.0, false).gradient).norm(), 1e-3);
  EXPECT_DOUBLE_EQ(dynamic_risk(p, o, 1.0, true).value, dynamic_risk(p, o, 1.0, false).value);
}

TEST(TotalRisk, ClampsMoversInsideTheMinimumRadius) {
  const Obstacle o = walker({0.0, 0.0}, {1.0, 0.0});
  RiskModel m;
  m.min_dynamic_radius = 0.5;
  EXPECT_NO_THROW(total_risk(o.mu, {o}, m));
  EXPECT_NEAR(total_risk({0.1, 0.0}, {o}, m).value, total_risk({0.5, 0.0}, {o}, m).value, 1e-12);
}

TEST(TotalRisk, IsTheSumOfItsObstacles) {
  Obstacle s;
  s.mu = {4.0, 4.0};
  const Obstacle d = walker({0.0, 0.0}, {0.5, 0.5});
  const RiskModel m;
  const Vec2 p(2.0, 1.0);
  EXPECT_NEAR(total_risk(p, {s, d}, m).value, static_risk(p, s).value + dynamic_risk(p, d, m.k1).value, 1e-15);
}

TEST(TotalRisk, MovingObstacleIsRiskierAhead) {
  const Obstacle o = walker({5.0, 5.0}, {-0.5, -0.3});
  const Vec2 dir = o.velocity.normalized();
  const RiskModel m;
  for (const double a : {0.5, 1.0, 2.0, 4.0}) {
    EXPECT_GT(total_risk(o.mu + a * dir, {o}, m).value, total_risk(o.mu - a * dir, {o}, m).value) << a;
  }
}

TEST(DirectionFactor, SignTellsFrontFromBack) {
  const Obstacle o = walker({0.0, 0.0}, {1.0, 0.0});
  EXPECT_GT(direction_factor({3.0, 1.0}, o, 4.0, 1e-6).delta, 0.0);
  EXPECT_LT(direction_factor({-3.0, 1.0}, o, 4.0, 1e-6).delta, 0.0);
  EXPECT_NEAR(direction_factor({3.0, 2.5}, o, 4.0, 1e-6).n_last, 2.5, 1e-12);
}

TEST(DirectionFactor, StandingObstacleIsDegenerate) {
  Obstacle o;
  EXPECT_TRUE(direction_factor({1.0, 1.0}, o, 4.0, 1e-6).degenerate);
}

TEST(Guidance, RewardsStepsDownTheRiskSlope) {
  Obstacle s;
  s.mu = {0.0, 0.0};
  const GuidanceConfig cfg;
  const RiskModel m;
  // Stepping away from a static peak is cheaper than stepping toward it.
  const double away = guidance_term({3.0, 0.0}, {2.0, 0.0}, {s}, cfg, m);
  const double toward = guidance_term({1.0, 0.0}, {2.0, 0.0}, {s}, cfg, m);
  EXPECT_LT(away, toward);
}

TEST(Guidance, FarAheadOfAMoverUsesItsVelocity) {
  const Obstacle o = walker({0.0, 0.0}, {1.0, 0.0});
  GuidanceConfig cfg;
  cfg.n_ref = 1.0;
  const Vec2 curr(3.0, 3.0), next(4.0, 3.0);
  const Vec2 d = (next - curr).normalized();
  EXPECT_NEAR(guidance_term(next, curr, Vec2(0.3, -0.2), {o}, cfg), o.velocity.dot(d), 1e-12);
}

TEST(Guidance, BehindAMoverUsesTheRiskGradient) {
  const Obstacle o = walker({0.0, 0.0}, {1.0, 0.0});
  const GuidanceConfig cfg;
  const Vec2 curr(-3.0, 1.0), next(-3.0, 2.0);
  const Vec2 grad(0.3, -0.2);
  EXPECT_NEAR(guidance_term(next, curr, grad, {o}, cfg), grad.dot(Vec2(0.0, 1.0)), 1e-12);
}

TEST(RiskGrid, BakesCellCentersAndFlagsSingularCells) {
  GridMap map(10, 6, 1.0);
  const Obstacle o = walker({4.5, 2.5}, {1.0, 0.0});
  const RiskGrid g = bake_risk_grid(map, {o}, RiskModel{});
  EXPECT_TRUE(g.clamped({4, 2}));
  EXPECT_FALSE(g.clamped({6, 2}));
  EXPECT_NEAR(g.at({6, 2}).value, dynamic_risk({6.5, 2.5}, o, 1.0).value, 1e-15);
  EXPECT_TRUE(std::isfinite(g.at({4, 2}).value));
}

TEST(RiskGrid, ArgmaxSitsOnThePeak) {
  GridMap map(12, 12, 1.0);
  Obstacle o;
  o.mu = {7.5, 3.5};
  const RiskGrid g = bake_risk_grid(map, {o}, RiskModel{});
  EXPECT_EQ(g.argmax(), (Cell{7, 3}));
}
