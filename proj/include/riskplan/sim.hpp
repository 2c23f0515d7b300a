#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskplan/bspline.hpp"
#include "riskplan/optimizer.hpp"
#include "riskplan/scenario.hpp"

namespace riskplan {

enum class Pipeline {
  Full,          ///< risk bake + R-A* + control-point shift + full optimization
  SearchOnly,    ///< R-A* + unoptimized spline
  RiskDisabled,  ///< plain A* + optimization without the dynamic-risk term
};

std::string_view to_string(Pipeline p);
/// Throws InputError for an unknown name.
Pipeline parse_pipeline(std::string_view name);

struct SimOptions {
  double dt_sim = 0.05;           ///< seconds
  double goal_tolerance = 0.5;    ///< cells
  double budget = 60.0;           ///< simulated seconds
  double cruise_fraction = 0.75;  ///< nominal speed as a fraction of v_m
  double accel_fraction = 0.5;    ///< speed-up and braking rate of the initial guess, as a fraction of a_m
  double replan_displacement = 0.5;  ///< cells a mover may travel before the risk grid is rebaked
  int optimizer_iters = 200;
  int horizon = 60;               ///< control points optimized per plan, after the fixed head
};

struct WorldState {
  double time = 0.0;
  Vec2 robot_pos = Vec2::Zero();
  Vec2 robot_vel = Vec2::Zero();
  std::vector<Obstacle> obstacles;
  std::vector<bool> activated;  ///< parallel to `obstacles`; irreversible
  std::optional<BSplineTrajectory> active_plan;
  double plan_time = 0.0;       ///< reference time along `active_plan`
  /// Robot limits. The robot tracks the plan with a PD law on top of the
  /// plan's acceleration, saturated at these bounds; infinite bounds make the
  /// robot follow the plan exactly.
  double speed_limit = kInf;
  double accel_limit = kInf;
};

/// Robot at the start cell center, at rest, limited to the scenario's v_m and a_m.
WorldState initial_state(const ScenarioConfig& cfg);

/// Advances time by `dt_sim`: moving obstacles translate by v * dt_sim, the
/// robot tracks its plan (whose end point is held once the plan runs out), then
/// triggers are tested against the new robot position. Indices of obstacles whose trigger
/// fired are appended to `fired`.
WorldState step_world(const WorldState& state, double dt_sim, std::vector<std::size_t>* fired = nullptr);

struct CollisionRecord {
  double time = 0.0;
  int obstacle_id = 0;
  Vec2 position = Vec2::Zero();
};

/// Robot center inside any footprint at the state's positions.
std::optional<CollisionRecord> check_collision(const WorldState& state);

/// Collision anywhere between two consecutive states. Robot and obstacles are
/// interpolated linearly and checked at sub-steps no longer than a quarter of
/// `resolution` in relative displacement.
std::optional<CollisionRecord> check_collision(const WorldState& before, const WorldState& after,
                                               double resolution);

struct TrialResult {
  std::uint64_t seed = 0;
  Pipeline pipeline = Pipeline::Full;
  bool success = false;
  double path_length = 0.0;    ///< distance travelled
  double min_clearance = kInf; ///< to high-risk footprints over the trial, floored at 0
  double planning_ms = 0.0;    ///< wall clock per plan, mean
  double flight_s = 0.0;       ///< simulated seconds until arrival or termination
  std::optional<double> collision_time;
  int replans = 0;             ///< plans after the initial one
  std::string reason;          ///< why the trial failed; empty on success
};

/// Plans a trajectory for the current state. Exposed for the CLI and tests.
struct PlanOutcome {
  BSplineTrajectory traj;
  double plan_time = 0.0;  ///< where the robot is on `traj`
  Path path;
  OptimizerReport report;
};
PlanOutcome plan_once(const ScenarioConfig& cfg, const WorldState& state, Pipeline pipeline,
                      const SimOptions& opts = {});

/// Closed-loop trial: plan, fly, replan whenever a trigger fires or a mover has
/// drifted by `replan_displacement` since the last plan.
TrialResult run_trial(const ScenarioConfig& cfg, Pipeline pipeline, const SimOptions& opts = {});

// --- scenario families and batches ------------------------------------------

enum class Family {
  Crossing,  ///< a standing person near the route steps across it
  Occluded,  ///< a person hidden behind a building corner steps out
  Random,    ///< random block map with two risky obstacles
};

std::string_view to_string(Family f);
Family parse_family(std::string_view name);

ScenarioConfig make_family_scenario(Family family, std::uint64_t seed);

/// A standing person 1.5 cells off a straight route, with a wall on the other
/// side leaving a narrow passage. When the robot comes within 6 cells the
/// person walks off at (-0.5, -0.3) cells/s, into the passage.
ScenarioConfig canonical_trigger_scenario();

struct BatchResult {
  std::vector<TrialResult> trials;  ///< ordered by seed
  double success_rate = 0.0;
  double mean_planning_ms = 0.0;
  double mean_flight_s = 0.0;       ///< over successful trials
};

using ScenarioSource = std::function<ScenarioConfig(std::uint64_t seed)>;

/// Runs `trials` trials with seeds base_seed, base_seed + 1, ... Trials run on
/// `jobs` threads; results are ordered by seed.
BatchResult run_batch(const ScenarioSource& source, Pipeline pipeline, int trials, std::uint64_t base_seed,
                      const SimOptions& opts = {}, int jobs = 1);

}  // namespace riskplan
