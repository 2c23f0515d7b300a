#include "riskplan/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "riskplan/ellipse.hpp"
#include "riskplan/rng.hpp"
#include "riskplan/search.hpp"

namespace riskplan {

std::string_view to_string(Pipeline p) {
  switch (p) {
    case Pipeline::Full: return "full";
    case Pipeline::SearchOnly: return "search_only";
    case Pipeline::RiskDisabled: return "risk_disabled";
  }
  return "?";
}

Pipeline parse_pipeline(std::string_view name) {
  if (name == "full") return Pipeline::Full;
  if (name == "search_only") return Pipeline::SearchOnly;
  if (name == "risk_disabled") return Pipeline::RiskDisabled;
  throw InputError("unknown pipeline '" + std::string(name) + "'");
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Crossing: return "crossing";
    case Family::Occluded: return "occluded";
    case Family::Random: return "random";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  if (name == "crossing") return Family::Crossing;
  if (name == "occluded") return Family::Occluded;
  if (name == "random") return Family::Random;
  throw InputError("unknown scenario family '" + std::string(name) + "'");
}

WorldState initial_state(const ScenarioConfig& cfg) {
  WorldState s;
  const GridMap g(cfg.map.width, cfg.map.height, cfg.map.resolution);
  s.robot_pos = g.center(cfg.start);
  s.obstacles = cfg.obstacles;
  s.activated.assign(cfg.obstacles.size(), false);
  s.speed_limit = cfg.params.v_m;
  s.accel_limit = cfg.params.a_m;
  return s;
}

namespace {
constexpr double kTrackP = 16.0;
constexpr double kTrackD = 8.0;
}  // namespace

WorldState step_world(const WorldState& state, double dt_sim, std::vector<std::size_t>* fired) {
  WorldState next = state;
  next.time = state.time + dt_sim;
  for (auto& obs : next.obstacles) {
    if (obs.moving()) obs.mu += obs.velocity * dt_sim;
  }
  if (next.active_plan) {
    const auto& plan = *next.active_plan;
    next.plan_time = std::min(state.plan_time + dt_sim, plan.duration());
    const bool running = next.plan_time < plan.duration();
    const Vec2 ref = evaluate(plan, next.plan_time);
    const Vec2 ref_vel = running ? evaluate(plan, next.plan_time, 1) : Vec2::Zero();
    if (std::isinf(state.accel_limit) && std::isinf(state.speed_limit)) {
      next.robot_pos = ref;
      next.robot_vel = ref_vel;
    } else {
      const Vec2 ref_acc = running ? evaluate(plan, next.plan_time, 2) : Vec2::Zero();
      Vec2 acc = ref_acc + kTrackP * (ref - state.robot_pos) + kTrackD * (ref_vel - state.robot_vel);
      if (acc.norm() > state.accel_limit) acc *= state.accel_limit / acc.norm();
      Vec2 vel = state.robot_vel + acc * dt_sim;
      if (vel.norm() > state.speed_limit) vel *= state.speed_limit / vel.norm();
      next.robot_vel = vel;
      next.robot_pos = state.robot_pos + vel * dt_sim;
    }
  } else {
    next.robot_vel.setZero();
  }
  for (std::size_t i = 0; i < next.obstacles.size(); ++i) {
    auto& obs = next.obstacles[i];
    if (next.activated[i] || !obs.trigger) continue;
    if ((next.robot_pos - obs.mu).norm() <= obs.trigger->activation_distance) {
      next.activated[i] = true;
      obs.velocity = obs.trigger->post_velocity;
      if (fired != nullptr) fired->push_back(i);
    }
  }
  return next;
}

namespace {

std::optional<CollisionRecord> collide_at(double time, const Vec2& robot, const std::vector<Obstacle>& obstacles,
                                          const std::vector<Vec2>& centers) {
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const auto& o = obstacles[i];
    if (inside_ellipse(robot, centers[i], o.sigma_x, o.sigma_y)) return CollisionRecord{time, o.id, robot};
  }
  return std::nullopt;
}

/// Points along the polyline one knot interval apart under a trapezoidal speed
/// profile: from `v0` toward `cruise` at `accel`, braking to rest at the end.
std::vector<Vec2> sample_profile(const std::vector<Vec2>& poly, double v0, double cruise, double accel, double dt) {
  std::vector<double> arc{0.0};
  for (std::size_t i = 1; i < poly.size(); ++i) arc.push_back(arc.back() + (poly[i] - poly[i - 1]).norm());
  const double total = arc.back();
  std::vector<Vec2> out{poly.front()};
  if (total <= 0.0) return out;

  const double v_min = 0.05 * cruise;
  double s = 0.0;
  double v = v0;
  std::size_t seg = 0;
  while (true) {
    const double brake = std::sqrt(2.0 * accel * std::max(total - s, 0.0));
    v = std::max(v_min, std::min({cruise, v + accel * dt, brake}));
    s += v * dt;
    if (s >= total - 1e-9) break;
    while (arc[seg + 1] < s) ++seg;
    const double u = (s - arc[seg]) / (arc[seg + 1] - arc[seg]);
    out.push_back(poly[seg] + u * (poly[seg + 1] - poly[seg]));
  }
  out.push_back(poly.back());
  return out;
}

}  // namespace

std::optional<CollisionRecord> check_collision(const WorldState& state) {
  std::vector<Vec2> centers;
  for (const auto& o : state.obstacles) centers.push_back(o.mu);
  return collide_at(state.time, state.robot_pos, state.obstacles, centers);
}

std::optional<CollisionRecord> check_collision(const WorldState& before, const WorldState& after,
                                               double resolution) {
  const Vec2 robot_step = after.robot_pos - before.robot_pos;
  double max_rel = robot_step.norm();
  for (std::size_t i = 0; i < after.obstacles.size(); ++i) {
    const Vec2 obs_step = after.obstacles[i].mu - before.obstacles[i].mu;
    max_rel = std::max(max_rel, (robot_step - obs_step).norm());
  }
  const int subs = std::max(1, static_cast<int>(std::ceil(max_rel / (0.25 * resolution))));
  std::vector<Vec2> centers(after.obstacles.size());
  for (int k = 1; k <= subs; ++k) {
    const double s = static_cast<double>(k) / subs;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      centers[i] = (1.0 - s) * before.obstacles[i].mu + s * after.obstacles[i].mu;
    }
    const Vec2 robot = (1.0 - s) * before.robot_pos + s * after.robot_pos;
    const double t = (1.0 - s) * before.time + s * after.time;
    if (auto hit = collide_at(t, robot, after.obstacles, centers)) return hit;
  }
  return std::nullopt;
}

PlanOutcome plan_once(const ScenarioConfig& cfg, const WorldState& state, Pipeline pipeline,
                      const SimOptions& opts) {
  const PlannerParams& params = cfg.params;
  const double res = cfg.map.resolution;
  const int deg = 3;

  GridMap grid(cfg.map.width, cfg.map.height, res);
  grid.rasterize(state.obstacles);

  // Head control points: the robot at rest for the first plan, otherwise the
  // old control points that shape the curve at the robot's current time.
  std::vector<Vec2> head;
  double plan_time = 0.0;
  if (state.active_plan) {
    const auto& old = *state.active_plan;
    const double dt = old.dt;
    const int last_span = static_cast<int>(old.size()) - deg - 1;
    const int j = std::clamp(static_cast<int>(std::floor(state.plan_time / dt)), 0, last_span);
    head.assign(old.control_points.begin() + j, old.control_points.begin() + j + deg + 1);
    plan_time = state.plan_time - j * dt;
  } else {
    head.assign(deg, state.robot_pos);
  }
  const Vec2 anchor = head.back();

  Cell start = grid.cell_of(anchor);
  start.x = std::clamp(start.x, 0, grid.width() - 1);
  start.y = std::clamp(start.y, 0, grid.height() - 1);
  grid.set_occupied(start, false);
  grid.set_occupied(cfg.goal, false);

  PlanOutcome out;
  const RiskModel model = RiskModel::from(params, res);
  if (pipeline == Pipeline::RiskDisabled) {
    out.path = astar_baseline(grid, start, cfg.goal);
  } else {
    const RiskGrid risk = bake_risk_grid(grid, state.obstacles, model, state.time);
    out.path = r_astar(grid, risk, state.obstacles, start, cfg.goal, SearchParams::from(params));
  }

  std::vector<Vec2> poly;
  poly.push_back(anchor);
  for (std::size_t i = 1; i + 1 < out.path.cells.size(); ++i) poly.push_back(grid.center(out.path.cells[i]));
  poly.push_back(grid.center(cfg.goal));
  if ((poly.back() - anchor).norm() < 1e-9) poly.resize(1);

  const double cruise = opts.cruise_fraction * params.v_m;
  const double accel = opts.accel_fraction * params.a_m;
  const double v0 = head.size() > 1 ? (head.back() - head.end()[-2]).norm() / params.dt : 0.0;
  const std::vector<Vec2> pts = sample_profile(poly, v0, cruise, accel, params.dt);

  BSplineTrajectory traj;
  traj.degree = deg;
  traj.dt = params.dt;
  traj.control_points = head;
  traj.control_points.insert(traj.control_points.end(), pts.begin() + 1, pts.end());
  // Rest at the goal.
  const Vec2 goal = traj.control_points.back();
  for (int k = 0; k < deg - 1; ++k) traj.control_points.push_back(goal);

  if (pipeline != Pipeline::SearchOnly) {
    ObjectiveWeights w = ObjectiveWeights::from(params);
    const RiskEvaluator eval = make_risk_evaluator(state.obstacles, model);
    if (pipeline == Pipeline::Full) {
      traj = init_shift_control_points(traj, eval, params.r_thresh, params.r_d, head.size()).traj;
    } else {
      w.lambda_r = 0.0;
    }
    // Receding horizon: only the first `horizon` control points are optimized;
    // the last deg of them stay put so the window joins the rest of the curve.
    const std::size_t n = traj.size();
    const std::size_t window = std::min(n, head.size() + static_cast<std::size_t>(opts.horizon));
    BSplineTrajectory local = traj;
    local.control_points.resize(window);
    OptimizerOptions o;
    o.max_iters = opts.optimizer_iters;
    o.fixed = FixedEnds{head.size(), static_cast<std::size_t>(deg)};
    auto res_opt = optimize(local, w, state.obstacles, eval, o);
    std::copy(res_opt.traj.control_points.begin(), res_opt.traj.control_points.end(), traj.control_points.begin());
    out.report = std::move(res_opt.report);
  }
  out.traj = std::move(traj);
  out.plan_time = plan_time;
  return out;
}

TrialResult run_trial(const ScenarioConfig& cfg, Pipeline pipeline, const SimOptions& opts) {
  validate(cfg);
  TrialResult result;
  result.seed = cfg.seed;
  result.pipeline = pipeline;

  const double res = cfg.map.resolution;
  const GridMap g(cfg.map.width, cfg.map.height, res);
  const Vec2 goal = g.center(cfg.goal);
  WorldState state = initial_state(cfg);
  std::vector<Vec2> baked_at;  // obstacle centers at the last plan

  double planning_total = 0.0;
  int plans = 0;
  auto replan = [&]() -> bool {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      PlanOutcome plan = plan_once(cfg, state, pipeline, opts);
      state.active_plan = std::move(plan.traj);
      state.plan_time = plan.plan_time;
    } catch (const std::exception& e) {
      result.reason = std::string("planner: ") + e.what();
      return false;
    }
    planning_total += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    ++plans;
    baked_at.clear();
    for (const auto& o : state.obstacles) baked_at.push_back(o.mu);
    return true;
  };

  auto clearance = [&](const WorldState& s) {
    return std::max(0.0, high_risk_clearance(s.robot_pos, s.obstacles));
  };
  result.min_clearance = clearance(state);

  bool planned = replan();
  while (planned) {
    if ((state.robot_pos - goal).norm() <= opts.goal_tolerance * res) {
      result.success = true;
      break;
    }
    if (state.time + 0.5 * opts.dt_sim >= opts.budget) {
      result.reason = "time budget exhausted";
      break;
    }
    std::vector<std::size_t> fired;
    WorldState next = step_world(state, opts.dt_sim, &fired);
    result.path_length += (next.robot_pos - state.robot_pos).norm();
    if (auto hit = check_collision(state, next, res)) {
      result.collision_time = hit->time;
      result.min_clearance = 0.0;
      result.reason = "collision with obstacle " + std::to_string(hit->obstacle_id);
      state = std::move(next);
      break;
    }
    state = std::move(next);
    result.min_clearance = std::min(result.min_clearance, clearance(state));

    bool drifted = false;
    for (std::size_t i = 0; i < state.obstacles.size() && !drifted; ++i) {
      drifted = (state.obstacles[i].mu - baked_at[i]).norm() > opts.replan_displacement * res;
    }
    if (!fired.empty() || drifted) planned = replan();
  }

  result.flight_s = state.time;
  result.replans = std::max(0, plans - 1);
  result.planning_ms = plans > 0 ? planning_total / plans : 0.0;
  return result;
}

// --- scenario families ------------------------------------------------------

namespace {

Obstacle person(int id, Vec2 mu, double sigma, double activation, Vec2 velocity) {
  Obstacle o;
  o.id = id;
  o.cls = ObstacleClass::TemporarilyStatic;
  o.mu = mu;
  o.sigma_x = sigma;
  o.sigma_y = sigma;
  o.semantic_weight = 3.0;
  o.trigger = BehaviorTrigger{activation, velocity};
  return o;
}

Obstacle block(int id, Vec2 mu, double sx, double sy, double corner_weight = 0.0) {
  Obstacle o;
  o.id = id;
  o.cls = ObstacleClass::StationaryStructure;
  o.mu = mu;
  o.sigma_x = sx;
  o.sigma_y = sy;
  o.semantic_weight = 1.0;
  o.corner_weight = corner_weight;
  return o;
}

ScenarioConfig crossing(std::uint64_t seed) {
  Rng rng(seed);
  ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.map = {40, 24, 1.0};
  cfg.start = {3, 12};
  cfg.goal = {36, 12};
  const double x = rng.uniform(17.0, 22.0);
  const double offset = rng.uniform(1.5, 3.0);
  const double speed = rng.uniform(2.0, 3.0);
  const double heading = rng.uniform(-2.1, -1.57);
  const double activation = rng.uniform(2.5, 4.0);
  const Vec2 velocity = speed * Vec2(std::cos(heading), std::sin(heading));
  cfg.obstacles.push_back(person(1, {x + 0.5, 12.5 + offset}, 0.8, activation, velocity));
  return cfg;
}

ScenarioConfig occluded(std::uint64_t seed) {
  Rng rng(seed);
  ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.map = {40, 24, 1.0};
  cfg.start = {3, 12};
  cfg.goal = {36, 12};
  const double size = 3.0;
  const double bx = rng.uniform(15.0, 20.0) + 0.5;
  const double by = 12.5 + size + rng.uniform(1.5, 3.0);
  cfg.obstacles.push_back(block(1, {bx, by}, size, size, 2.0));
  // Tucked in beside the building's lower corner, out of sight of the approach.
  const double py = 12.5 + rng.uniform(1.5, 3.0);
  const double px = bx + size + rng.uniform(0.5, 1.5);
  const double speed = rng.uniform(2.0, 3.0);
  const double heading = rng.uniform(-1.9, -1.4);
  const double activation = rng.uniform(2.5, 4.0);
  const Vec2 velocity = speed * Vec2(std::cos(heading), std::sin(heading));
  cfg.obstacles.push_back(person(2, {px, py}, 0.8, activation, velocity));
  return cfg;
}

}  // namespace

ScenarioConfig canonical_trigger_scenario() {
  ScenarioConfig cfg;
  cfg.map = {40, 40, 1.0};
  cfg.start = {5, 20};
  cfg.goal = {34, 20};
  cfg.obstacles.push_back(person(1, {20.5, 22.0}, 0.8, 6.0, {-0.5, -0.3}));
  cfg.obstacles.push_back(block(2, {20.5, 18.7}, 6.0, 1.0));
  return cfg;
}

ScenarioConfig make_family_scenario(Family family, std::uint64_t seed) {
  switch (family) {
    case Family::Crossing: return crossing(seed);
    case Family::Occluded: return occluded(seed);
    case Family::Random: return generate_random_map(50, 50, 12, 2, seed);
  }
  throw InputError("unknown scenario family");
}

BatchResult run_batch(const ScenarioSource& source, Pipeline pipeline, int trials, std::uint64_t base_seed,
                      const SimOptions& opts, int jobs) {
  BatchResult out;
  if (trials <= 0) return out;
  out.trials.resize(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < trials; i = next++) {
      const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
      TrialResult r;
      try {
        r = run_trial(source(seed), pipeline, opts);
      } catch (const std::exception& e) {
        r.reason = std::string("invalid scenario: ") + e.what();
      }
      r.seed = seed;
      r.pipeline = pipeline;
      out.trials[static_cast<std::size_t>(i)] = std::move(r);
    }
  };
  const int n = std::clamp(jobs, 1, trials);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int ok = 0;
  double plan_ms = 0.0;
  double flight = 0.0;
  for (const auto& r : out.trials) {
    plan_ms += r.planning_ms;
    if (r.success) {
      ++ok;
      flight += r.flight_s;
    }
  }
  out.success_rate = static_cast<double>(ok) / trials;
  out.mean_planning_ms = plan_ms / trials;
  out.mean_flight_s = ok > 0 ? flight / ok : 0.0;
  return out;
}

}  // namespace riskplan
