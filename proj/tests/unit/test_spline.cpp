#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "riskplan/bspline.hpp"

using namespace riskplan;

namespace {

BSplineTrajectory line(int n, double spacing, double dt = 0.1) {
  BSplineTrajectory t;
  t.dt = dt;
  for (int i = 0; i < n; ++i) t.control_points.push_back({spacing * i, 0.0});
  return t;
}

/// Is `p` inside the convex hull of `pts`? Points are few, so test against
/// every supporting line through a pair.
bool in_hull(const Vec2& p, std::span<const Vec2> pts) {
  const double tol = 1e-9;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const Vec2 e = pts[j] - pts[i];
      if (e.norm() < 1e-12) continue;
      bool all_left = true;
      for (const Vec2& q : pts) {
        const Vec2 w = q - pts[i];
        if (e.x() * w.y() - e.y() * w.x() < -tol) all_left = false;
      }
      if (!all_left) continue;
      const Vec2 w = p - pts[i];
      if (e.x() * w.y() - e.y() * w.x() < -tol) return false;
    }
  }
  return true;
}

}  // namespace

TEST(BSpline, DurationCountsSegments) {
  EXPECT_NEAR(line(10, 1.0, 0.2).duration(), 1.4, 1e-12);
}

TEST(BSpline, ValidateRejectsBadShapes) {
  EXPECT_THROW(validate(line(3, 1.0)), InvariantError);
  EXPECT_THROW(validate(line(6, 1.0, 0.0)), InvariantError);
  EXPECT_NO_THROW(validate(line(4, 1.0)));
}

TEST(BSpline, EvaluateRejectsTimesOutsideTheDomain) {
  const auto t = line(6, 1.0);
  EXPECT_THROW(evaluate(t, -1e-3), InputError);
  EXPECT_THROW(evaluate(t, t.duration() + 1e-3), InputError);
  EXPECT_NO_THROW(evaluate(t, t.duration()));
}

TEST(BSpline, UniformLineMovesAtConstantSpeed) {
  const auto t = line(12, 0.3, 0.1);
  for (double s = 0.0; s <= t.duration(); s += 0.037) {
    EXPECT_NEAR(evaluate(t, s, 1).x(), 3.0, 1e-9);
    EXPECT_NEAR(evaluate(t, s, 2).norm(), 0.0, 1e-7);
  }
}

TEST(BSpline, StartsAtTheSixthWeightedAverage) {
  BSplineTrajectory t;
  t.control_points = {{0, 0}, {1, 2}, {3, 1}, {4, 4}, {6, 3}};
  const Vec2 expected = (t.control_points[0] + 4.0 * t.control_points[1] + t.control_points[2]) / 6.0;
  EXPECT_NEAR((evaluate(t, 0.0) - expected).norm(), 0.0, 1e-12);
}

TEST(BSpline, CurveStaysInsideTheActiveHull) {
  Rng rng(31);
  for (int k = 0; k < 20; ++k) {
    const auto t = oracle::random_trajectory(rng, 10);
    for (double s = 0.0; s <= t.duration(); s += t.dt / 7.0) {
      EXPECT_TRUE(in_hull(evaluate(t, s), active_control_points(t, s))) << s;
    }
  }
}

TEST(BSpline, SecondDerivativeIsContinuousAcrossKnots) {
  Rng rng(32);
  const auto t = oracle::random_trajectory(rng, 12);
  for (int j = 1; j < static_cast<int>(t.size()) - 3; ++j) {
    const double knot = j * t.dt;
    for (int order = 0; order <= 2; ++order) {
      const Vec2 left = evaluate(t, knot - 1e-9, order);
      const Vec2 right = evaluate(t, knot + 1e-9, order);
      EXPECT_LT((left - right).norm(), 1e-4 * (1.0 + left.norm())) << "order " << order << " knot " << j;
    }
  }
}

TEST(BSpline, DerivativesMatchCentralDifferences) {
  Rng rng(33);
  const auto t = oracle::random_trajectory(rng, 9);
  const double h = 1e-6;
  for (double s = 0.05; s < t.duration() - 0.05; s += 0.031) {
    const Vec2 v_fd = (evaluate(t, s + h) - evaluate(t, s - h)) / (2 * h);
    EXPECT_LT((evaluate(t, s, 1) - v_fd).norm(), 1e-5 * (1.0 + v_fd.norm()));
    const Vec2 a_fd = (evaluate(t, s + h, 1) - evaluate(t, s - h, 1)) / (2 * h);
    EXPECT_LT((evaluate(t, s, 2) - a_fd).norm(), 1e-4 * (1.0 + a_fd.norm()));
  }
}

TEST(BSpline, DerivativePointsAreScaledDifferences) {
  BSplineTrajectory t;
  t.dt = 0.5;
  t.control_points = {{0, 0}, {1, 0}, {3, 0}, {6, 0}, {10, 0}};
  const auto v = t.velocity_points();
  const auto a = t.acceleration_points();
  const auto j = t.jerk_points();
  ASSERT_EQ(v.size(), 4u);
  ASSERT_EQ(a.size(), 3u);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_DOUBLE_EQ(v[2].x(), 6.0);
  EXPECT_DOUBLE_EQ(a[0].x(), 4.0);
  EXPECT_DOUBLE_EQ(j[1].x(), 0.0);
}

TEST(Fit, InterpolatesTheEndsAndKeepsStraightLinesStraight) {
  const std::vector<Vec2> pts{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  const auto t = fit_initial_spline(pts, 0.2);
  EXPECT_NEAR((evaluate(t, 0.0) - pts.front()).norm(), 0.0, 1e-12);
  EXPECT_NEAR((evaluate(t, t.duration()) - pts.back()).norm(), 0.0, 1e-12);
  for (double s = 0.0; s <= t.duration(); s += 0.05) {
    const Vec2 p = evaluate(t, s);
    EXPECT_NEAR(p.x(), p.y(), 1e-12);
  }
  EXPECT_THROW(fit_initial_spline(std::vector<Vec2>{{0, 0}}, 0.2), InputError);
}

TEST(Resample, KeepsBothEndsAndTheSpacing) {
  const std::vector<Vec2> poly{{0, 0}, {3, 0}, {3, 2}};
  const auto pts = resample_polyline(poly, 0.7);
  EXPECT_EQ(pts.front(), poly.front());
  EXPECT_EQ(pts.back(), poly.back());
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) EXPECT_LE((pts[i] - pts[i - 1]).norm(), 0.7 + 1e-12);
}

TEST(Shift, MovesRiskyPointsDownhillByTheStep) {
  auto t = line(10, 0.5);
  Obstacle o;
  o.mu = {2.25, -0.4};
  o.semantic_weight = 3.0;
  const RiskEvaluator risk = make_risk_evaluator({o}, RiskModel{});
  const ShiftResult s = init_shift_control_points(t, risk, 0.02, 0.5, 3);
  ASSERT_FALSE(s.shifted.empty());
  for (const std::size_t i : s.shifted) {
    EXPECT_GE(i, 3u);
    EXPECT_LT(i, t.size() - 3);
    EXPECT_NEAR((s.traj.control_points[i] - t.control_points[i]).norm(), 0.5, 1e-12);
    EXPECT_GT(s.traj.control_points[i].y(), t.control_points[i].y());
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(s.traj.control_points[i], t.control_points[i]);
}

TEST(Shift, FlagsPointsWithoutAGradient) {
  auto t = line(9, 0.5);
  Obstacle o;
  o.mu = t.control_points[4];
  o.semantic_weight = 3.0;
  const ShiftResult s = init_shift_control_points(t, make_risk_evaluator({o}, RiskModel{}), 0.02, 0.5, 1);
  EXPECT_EQ(s.flagged, std::vector<std::size_t>{4});
  EXPECT_EQ(s.traj.control_points[4], t.control_points[4]);
}
