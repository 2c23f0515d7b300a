#include "riskplan/riskfield.hpp"

#include <cmath>
#include <numbers>

namespace riskplan {
namespace {

// (2 pi)^{-3/2}
const double kStaticNorm = 1.0 / std::sqrt(std::pow(2.0 * std::numbers::pi, 3));

RiskSample gaussian(const Vec2& p, const Vec2& mu, double sx, double sy, double weight) {
  const Vec2 r = p - mu;
  const double ix = 1.0 / (sx * sx);
  const double iy = 1.0 / (sy * sy);
  const double m = r.x() * r.x() * ix + r.y() * r.y() * iy;
  RiskSample s;
  s.value = weight * kStaticNorm / (sx * sy) * std::exp(-0.5 * m);
  s.gradient = -s.value * Vec2(r.x() * ix, r.y() * iy);
  return s;
}

RiskSample& operator+=(RiskSample& a, const RiskSample& b) {
  a.value += b.value;
  a.gradient += b.gradient;
  return a;
}

}  // namespace

RiskSample static_risk(const Vec2& p, const Obstacle& obs) {
  return gaussian(p, obs.mu, obs.sigma_x, obs.sigma_y, obs.semantic_weight);
}

RiskSample dynamic_risk(const Vec2& p, const Obstacle& obs, double k1, bool literal_gradient) {
  const Vec2 r = p - obs.mu;
  const double r2 = r.squaredNorm();
  if (r2 == 0.0) throw SingularityError();
  const double rn = std::sqrt(r2);
  const Vec2& v = obs.velocity;
  const double vr = v.dot(r);

  RiskSample s;
  s.value = obs.semantic_weight / r2 * std::exp(k1 * vr / rn);
  if (literal_gradient) {
    s.gradient = -s.value / rn * (2.0 * r - k1 * v + k1 * vr * r);
  } else {
    s.gradient = s.value * (-2.0 * r / r2 + k1 * (v / rn - vr * r / (r2 * rn)));
  }
  return s;
}

RiskSample corner_risk(const Vec2& p, const Obstacle& obs) {
  RiskSample s;
  if (obs.corner_weight <= 0.0) return s;
  for (const double cx : {-1.0, 1.0}) {
    for (const double cy : {-1.0, 1.0}) {
      const Vec2 corner = obs.mu + Vec2(cx * obs.sigma_x, cy * obs.sigma_y);
      s += gaussian(p, corner, kCornerSigma, kCornerSigma, obs.corner_weight);
    }
  }
  return s;
}

RiskSample obstacle_risk(const Vec2& p, const Obstacle& obs, const RiskModel& model) {
  if (!obs.moving()) {
    RiskSample s = static_risk(p, obs);
    s += corner_risk(p, obs);
    return s;
  }
  const Vec2 r = p - obs.mu;
  const double rn = r.norm();
  if (model.min_dynamic_radius > 0.0 && rn < model.min_dynamic_radius) {
    const Vec2 dir = rn > 0.0 ? Vec2(r / rn) : Vec2(obs.velocity.normalized());
    return dynamic_risk(obs.mu + model.min_dynamic_radius * dir, obs, model.k1, model.literal_dynamic_gradient);
  }
  return dynamic_risk(p, obs, model.k1, model.literal_dynamic_gradient);
}

RiskSample total_risk(const Vec2& p, const std::vector<Obstacle>& obstacles, const RiskModel& model) {
  RiskSample s;
  for (const auto& obs : obstacles) s += obstacle_risk(p, obs, model);
  return s;
}

RiskEvaluator make_risk_evaluator(std::vector<Obstacle> obstacles, const RiskModel& model) {
  return [obstacles = std::move(obstacles), model](const Vec2& p) { return total_risk(p, obstacles, model); };
}

DirectionalContext direction_factor(const Vec2& p_curr, const Obstacle& obs, double n_ref, double epsilon) {
  DirectionalContext ctx;
  ctx.n_ref = n_ref;
  ctx.epsilon = epsilon;
  const Vec2 off = p_curr - obs.mu;
  const double speed = obs.velocity.norm();
  ctx.delta = off.dot(obs.velocity) / (speed + epsilon);
  if (speed == 0.0) {
    ctx.degenerate = true;
    ctx.n_last = off.norm();
    return ctx;
  }
  const Vec2 dir = obs.velocity / speed;
  ctx.n_last = std::abs(dir.x() * off.y() - dir.y() * off.x());
  return ctx;
}

double guidance_term(const Vec2& p_id, const Vec2& p_curr, const Vec2& grad_at_id,
                     const std::vector<Obstacle>& obstacles, const GuidanceConfig& cfg) {
  const Vec2 d_air = p_id - p_curr;
  const Obstacle* driver = nullptr;
  double driver_risk = -1.0;
  for (const auto& obs : obstacles) {
    if (!obs.moving() || (p_id - obs.mu).norm() > cfg.rho_dyn) continue;
    const double r2 = (p_curr - obs.mu).squaredNorm();
    const double risk = r2 == 0.0 ? kInf : dynamic_risk(p_curr, obs, cfg.k1).value;
    if (risk > driver_risk) {
      driver_risk = risk;
      driver = &obs;
    }
  }
  if (driver != nullptr) {
    const auto ctx = direction_factor(p_curr, *driver, cfg.n_ref, cfg.epsilon);
    if (ctx.delta > 0.0 && ctx.n_last >= ctx.n_ref) return driver->velocity.dot(d_air);
  }
  return grad_at_id.dot(d_air);
}

double guidance_term(const Vec2& p_id, const Vec2& p_curr, const std::vector<Obstacle>& obstacles,
                     const GuidanceConfig& cfg, const RiskModel& model) {
  return guidance_term(p_id, p_curr, total_risk(p_id, obstacles, model).gradient, obstacles, cfg);
}

// --- RiskGrid ---------------------------------------------------------------

RiskGrid::RiskGrid(int width, int height, double resolution, double time)
    : width_(width), height_(height), resolution_(resolution), time_(time),
      cells_(static_cast<size_t>(width) * height), clamped_(static_cast<size_t>(width) * height, 0) {}

Cell RiskGrid::argmax() const {
  Cell best{0, 0};
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (at({x, y}).value > at(best).value) best = {x, y};
    }
  }
  return best;
}

RiskGrid bake_risk_grid(const GridMap& map, const std::vector<Obstacle>& obstacles, const RiskModel& model,
                        double time) {
  RiskGrid grid(map.width(), map.height(), map.resolution(), time);
  RiskModel exact = model;
  exact.min_dynamic_radius = 0.0;

  for (const auto& obs : obstacles) {
    if (!obs.moving()) continue;
    const Cell c = map.cell_of(obs.mu);
    if (map.in_bounds(c)) grid.set_clamped(c, true);
  }
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!grid.clamped({x, y})) grid.at({x, y}) = total_risk(map.center({x, y}), obstacles, exact);
    }
  }
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!grid.clamped({x, y})) continue;
      RiskSample best;
      bool found = false;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const Cell n{x + dx, y + dy};
          if (!map.in_bounds(n) || grid.clamped(n)) continue;
          if (!found || grid.at(n).value > best.value) best = grid.at(n);
          found = true;
        }
      }
      grid.at({x, y}) = best;
    }
  }
  return grid;
}

}  // namespace riskplan
