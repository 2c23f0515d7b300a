#include <gtest/gtest.h>

#include "riskplan/export.hpp"
#include "riskplan/sim.hpp"

using namespace riskplan;

namespace {

ScenarioConfig empty_corridor() {
  ScenarioConfig cfg;
  cfg.map = {40, 10, 1.0};
  cfg.start = {2, 5};
  cfg.goal = {37, 5};
  return cfg;
}

Obstacle mover(int id, Vec2 mu, Vec2 v, double sigma = 0.5) {
  Obstacle o;
  o.id = id;
  o.cls = ObstacleClass::ContinuouslyDynamic;
  o.mu = mu;
  o.velocity = v;
  o.sigma_x = o.sigma_y = sigma;
  o.trigger = BehaviorTrigger{1.0, v};
  return o;
}

BSplineTrajectory straight_plan(Vec2 from, Vec2 step, int n) {
  BSplineTrajectory t;
  for (int i = 0; i < n; ++i) t.control_points.push_back(from + step * i);
  return t;
}

}  // namespace

TEST(Pipeline, NamesRoundTrip) {
  for (const Pipeline p : {Pipeline::Full, Pipeline::SearchOnly, Pipeline::RiskDisabled}) {
    EXPECT_EQ(parse_pipeline(to_string(p)), p);
  }
  EXPECT_THROW(parse_pipeline("fast"), InputError);
  EXPECT_THROW(parse_family("forest"), InputError);
}

TEST(StepWorld, MovesObstaclesByVelocityTimesDt) {
  WorldState s;
  s.obstacles = {mover(1, {10.0, 10.0}, {-0.5, -0.3})};
  s.activated = {true};
  const WorldState n = step_world(s, 0.1);
  EXPECT_NEAR(n.obstacles[0].mu.x(), 9.95, 1e-12);
  EXPECT_NEAR(n.obstacles[0].mu.y(), 9.97, 1e-12);
  EXPECT_NEAR(n.time, 0.1, 1e-15);
}

TEST(StepWorld, TwoHalfStepsEqualOneStep) {
  WorldState s;
  s.obstacles = {mover(1, {10.0, 10.0}, {-0.5, -0.3})};
  s.activated = {true};
  s.active_plan = straight_plan({0.0, 0.0}, {0.15, 0.05}, 30);
  s.robot_pos = evaluate(*s.active_plan, 0.0);
  const WorldState one = step_world(s, 0.1);
  const WorldState two = step_world(step_world(s, 0.05), 0.05);
  EXPECT_NEAR((one.obstacles[0].mu - two.obstacles[0].mu).norm(), 0.0, 1e-12);
  EXPECT_NEAR((one.robot_pos - two.robot_pos).norm(), 0.0, 1e-12);
  EXPECT_NEAR(one.plan_time, two.plan_time, 1e-15);
}

TEST(StepWorld, SaturatedTrackingNeverTeleports) {
  WorldState s;
  s.speed_limit = 2.0;
  s.accel_limit = 3.0;
  s.active_plan = straight_plan({10.0, 0.0}, {0.2, 0.0}, 20);  // starts far from the robot
  for (int i = 0; i < 100; ++i) {
    const WorldState n = step_world(s, 0.05);
    EXPECT_LE((n.robot_pos - s.robot_pos).norm(), 2.0 * 0.05 + 1e-12);
    EXPECT_LE((n.robot_vel - s.robot_vel).norm(), 3.0 * 0.05 + 1e-12);
    s = n;
  }
}

TEST(StepWorld, TriggersFireOnceAndStayFired) {
  WorldState s;
  Obstacle person;
  person.id = 4;
  person.cls = ObstacleClass::TemporarilyStatic;
  person.mu = {3.0, 0.0};
  person.trigger = BehaviorTrigger{2.0, {0.0, 1.0}};
  s.obstacles = {person};
  s.activated = {false};
  s.robot_pos = {0.0, 0.0};
  std::vector<std::size_t> fired;
  s = step_world(s, 0.05, &fired);
  EXPECT_TRUE(fired.empty());
  s.robot_pos = {1.5, 0.0};
  s = step_world(s, 0.05, &fired);
  EXPECT_EQ(fired, std::vector<std::size_t>{0});
  EXPECT_EQ(s.obstacles[0].velocity, Vec2(0.0, 1.0));
  fired.clear();
  s.robot_pos = {-20.0, 0.0};
  s = step_world(s, 0.05, &fired);
  EXPECT_TRUE(fired.empty());
  EXPECT_TRUE(s.activated[0]);
  EXPECT_TRUE(s.obstacles[0].moving());
}

TEST(Collision, SubStepsCatchAFastCrossing) {
  WorldState before;
  before.obstacles = {mover(3, {-2.0, 0.0}, {40.0, 0.0}, 0.3)};
  before.activated = {true};
  WorldState after = before;
  after.time = 0.1;
  after.obstacles[0].mu = {2.0, 0.0};
  EXPECT_FALSE(check_collision(before));
  EXPECT_FALSE(check_collision(after));
  const auto hit = check_collision(before, after, 1.0);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->obstacle_id, 3);
  EXPECT_GT(hit->time, 0.0);
  EXPECT_LT(hit->time, 0.1);
}

TEST(Trial, EmptyMapPathIsNearlyStraight) {
  const ScenarioConfig cfg = empty_corridor();
  for (const Pipeline p : {Pipeline::Full, Pipeline::SearchOnly, Pipeline::RiskDisabled}) {
    const TrialResult r = run_trial(cfg, p);
    EXPECT_TRUE(r.success) << to_string(p) << ": " << r.reason;
    EXPECT_NEAR(r.path_length, 35.0, 0.02 * 35.0) << to_string(p);
    EXPECT_EQ(r.replans, 0);
    EXPECT_EQ(r.min_clearance, kInf);
  }
}

TEST(Trial, RespectsTheSpeedLimit) {
  const TrialResult r = run_trial(empty_corridor(), Pipeline::Full);
  ASSERT_TRUE(r.success);
  EXPECT_GE(r.flight_s, 35.0 / 2.0);
}

TEST(Trial, CanonicalTriggerSeparatesThePipelines) {
  const ScenarioConfig cfg = canonical_trigger_scenario();
  const TrialResult full = run_trial(cfg, Pipeline::Full);
  const TrialResult plain = run_trial(cfg, Pipeline::RiskDisabled);
  EXPECT_TRUE(full.success) << full.reason;
  EXPECT_GE(full.min_clearance, 1.5);
  EXPECT_GE(full.replans, 1);
  EXPECT_TRUE(plain.collision_time.has_value());
  EXPECT_EQ(plain.min_clearance, 0.0);
}

TEST(Trial, UnreachableGoalIsReportedNotThrown) {
  ScenarioConfig cfg = empty_corridor();
  Obstacle wall;
  wall.id = 1;
  wall.mu = {20.0, 5.0};
  wall.sigma_x = 1.0;
  wall.sigma_y = 8.0;
  cfg.obstacles = {wall};
  const TrialResult r = run_trial(cfg, Pipeline::Full);
  EXPECT_FALSE(r.success);
  EXPECT_NE(r.reason.find("planner"), std::string::npos);
}

TEST(Trial, RepeatsExactly) {
  const ScenarioConfig cfg = make_family_scenario(Family::Occluded, 7);
  const TrialResult a = run_trial(cfg, Pipeline::Full);
  const TrialResult b = run_trial(cfg, Pipeline::Full);
  EXPECT_EQ(a.success, b.success);
  EXPECT_EQ(a.path_length, b.path_length);
  EXPECT_EQ(a.min_clearance, b.min_clearance);
  EXPECT_EQ(a.flight_s, b.flight_s);
  EXPECT_EQ(a.replans, b.replans);
}

TEST(PlanOnce, HeadStartsAtTheRobot) {
  const ScenarioConfig cfg = empty_corridor();
  const PlanOutcome p = plan_once(cfg, initial_state(cfg), Pipeline::Full);
  EXPECT_NEAR((evaluate(p.traj, p.plan_time) - cfg.grid().center(cfg.start)).norm(), 0.0, 1e-9);
  EXPECT_EQ(p.path.cells.front(), cfg.start);
}

TEST(Batch, ZeroTrialsIsEmpty) {
  const BatchResult b = run_batch([](std::uint64_t s) { return make_family_scenario(Family::Crossing, s); },
                                  Pipeline::Full, 0, 1);
  EXPECT_TRUE(b.trials.empty());
  EXPECT_EQ(b.success_rate, 0.0);
}

TEST(Batch, ThreadCountDoesNotChangeResults) {
  const ScenarioSource src = [](std::uint64_t s) { return make_family_scenario(Family::Crossing, s); };
  const BatchResult one = run_batch(src, Pipeline::SearchOnly, 6, 3, {}, 1);
  const BatchResult many = run_batch(src, Pipeline::SearchOnly, 6, 3, {}, 3);
  std::ostringstream a, b;
  write_trials_csv(a, one.trials);
  write_trials_csv(b, many.trials);
  EXPECT_EQ(a.str(), b.str());
  for (std::size_t i = 0; i < one.trials.size(); ++i) EXPECT_EQ(one.trials[i].seed, 3 + i);
}

TEST(Families, SeedsChangeTheGeometry) {
  for (const Family f : {Family::Crossing, Family::Occluded, Family::Random}) {
    const ScenarioConfig a = make_family_scenario(f, 1);
    EXPECT_NO_THROW(validate(a));
    EXPECT_EQ(to_json(a), to_json(make_family_scenario(f, 1)));
    EXPECT_NE(to_json(a), to_json(make_family_scenario(f, 2)));
  }
}

TEST(Export, NumbersAndHashesAreStable) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(kInf), "inf");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(hex64(fnv1a("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a("a")), "af63dc4c8601ec8c");
}

TEST(Export, TrajectoryCsvCoversTheWholeCurve) {
  BSplineTrajectory t = straight_plan({0.0, 0.0}, {0.1, 0.0}, 10);
  std::ostringstream os;
  write_trajectory_csv(os, t, 0.25, {});
  std::istringstream is(os.str());
  std::string line, last;
  int rows = -1;
  while (std::getline(is, line)) {
    ++rows;
    last = line;
  }
  EXPECT_EQ(rows, 4);  // 0, 0.25, 0.5, and the end at 0.7
  EXPECT_EQ(last.substr(0, 4), "0.7,");
  EXPECT_THROW(write_trajectory_csv(os, t, 0.0, {}), InputError);
}
