#include "riskplan/objective.hpp"

#include <algorithm>
#include <cmath>

#include "riskplan/ellipse.hpp"

namespace riskplan {

CostResult cost_smoothness(const BSplineTrajectory& traj) {
  const auto& q = traj.control_points;
  const std::size_t n = q.size();
  CostResult out(n);
  const double dt2 = traj.dt * traj.dt;
  const double dt3 = dt2 * traj.dt;

  for (std::size_t i = 0; i + 2 < n; ++i) {
    const Vec2 a = (q[i + 2] - 2.0 * q[i + 1] + q[i]) / dt2;
    out.value += a.squaredNorm();
    const Vec2 g = 2.0 * a / dt2;
    out.gradient[i] += g;
    out.gradient[i + 1] -= 2.0 * g;
    out.gradient[i + 2] += g;
  }
  for (std::size_t i = 0; i + 3 < n; ++i) {
    const Vec2 j = (q[i + 3] - 3.0 * q[i + 2] + 3.0 * q[i + 1] - q[i]) / dt3;
    out.value += j.squaredNorm();
    const Vec2 g = 2.0 * j / dt3;
    out.gradient[i] -= g;
    out.gradient[i + 1] += 3.0 * g;
    out.gradient[i + 2] -= 3.0 * g;
    out.gradient[i + 3] += g;
  }
  return out;
}

CostResult cost_collision(const BSplineTrajectory& traj, const std::vector<Obstacle>& obstacles, double s_f) {
  const auto& q = traj.control_points;
  CostResult out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (const auto& obs : obstacles) {
      // |p - mu| - max semi-axis bounds the signed boundary distance from below.
      if ((q[i] - obs.mu).norm() - std::max(obs.sigma_x, obs.sigma_y) >= s_f) continue;
      const auto d = ellipse_distance(q[i], obs.mu, obs.sigma_x, obs.sigma_y);
      const double pen = s_f - d.signed_distance;
      if (pen <= 0.0) continue;
      out.value += hinge3(pen);
      out.gradient[i] -= hinge3_deriv(pen) * d.normal;
    }
  }
  return out;
}

CostResult cost_dynamic_feasibility(const BSplineTrajectory& traj, double v_m, double a_m) {
  const auto& q = traj.control_points;
  const std::size_t n = q.size();
  CostResult out(n);
  const double dt = traj.dt;
  const double dt2 = dt * dt;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 v = (q[i + 1] - q[i]) / dt;
    const double x = v.squaredNorm() - v_m * v_m;
    if (x <= 0.0) continue;
    out.value += hinge3(x);
    const Vec2 g = hinge3_deriv(x) * 2.0 * v / dt;
    out.gradient[i] -= g;
    out.gradient[i + 1] += g;
  }
  for (std::size_t i = 0; i + 2 < n; ++i) {
    const Vec2 a = (q[i + 2] - 2.0 * q[i + 1] + q[i]) / dt2;
    const double x = a.squaredNorm() - a_m * a_m;
    if (x <= 0.0) continue;
    out.value += hinge3(x);
    const Vec2 g = hinge3_deriv(x) * 2.0 * a / dt2;
    out.gradient[i] += g;
    out.gradient[i + 1] -= 2.0 * g;
    out.gradient[i + 2] += g;
  }
  return out;
}

CostResult cost_dynamic_risk(const BSplineTrajectory& traj, const std::vector<Obstacle>& obstacles,
                             const RiskEvaluator& risk, double r_thresh, double C, bool backward) {
  const auto& q = traj.control_points;
  CostResult out(q.size());
  const bool any_moving = std::any_of(obstacles.begin(), obstacles.end(), [](const Obstacle& o) { return o.moving(); });
  if (!any_moving) return out;
  const double sign = backward ? -1.0 : 1.0;

  for (std::size_t i = 0; i < q.size(); ++i) {
    if (risk(q[i]).value < r_thresh) continue;
    for (const auto& obs : obstacles) {
      if (!obs.moving()) continue;
      const Vec2 predicted = obs.mu + sign * obs.velocity * (traj.dt * static_cast<double>(i));
      const Vec2 r = q[i] - predicted;
      const double d = r.norm();
      const double x = C - d;
      if (x <= 0.0) continue;
      out.value += hinge3(x);
      Vec2 dir;
      if (d > 0.0) {
        dir = r / d;
      } else {
        // Coincident with the prediction: push along the incoming segment.
        const Vec2 seg = i > 0 ? Vec2(q[i] - q[i - 1]) : Vec2(q.size() > 1 ? Vec2(q[1] - q[0]) : Vec2::UnitX());
        dir = seg.norm() > 0.0 ? Vec2(seg.normalized()) : Vec2::UnitX();
        ++out.degenerate;
      }
      out.gradient[i] -= hinge3_deriv(x) * dir;
    }
  }
  return out;
}

CostResult total_objective(const BSplineTrajectory& traj, const ObjectiveWeights& w,
                           const std::vector<Obstacle>& obstacles, const RiskEvaluator& risk, FixedEnds fixed,
                           ObjectiveBreakdown* breakdown) {
  const std::size_t n = traj.size();
  CostResult out(n);
  ObjectiveBreakdown parts;
  auto accumulate = [&](double weight, const CostResult& term, double& slot) {
    slot = term.value;
    out.value += weight * term.value;
    for (std::size_t i = 0; i < n; ++i) out.gradient[i] += weight * term.gradient[i];
    out.degenerate += term.degenerate;
  };
  if (w.lambda_s != 0.0) accumulate(w.lambda_s, cost_smoothness(traj), parts.smoothness);
  if (w.lambda_c != 0.0) accumulate(w.lambda_c, cost_collision(traj, obstacles, w.s_f), parts.collision);
  if (w.lambda_d != 0.0) accumulate(w.lambda_d, cost_dynamic_feasibility(traj, w.v_m, w.a_m), parts.feasibility);
  if (w.lambda_r != 0.0) {
    accumulate(w.lambda_r, cost_dynamic_risk(traj, obstacles, risk, w.r_thresh, w.C, w.backward_prediction),
               parts.risk);
  }
  for (std::size_t i = 0; i < std::min(fixed.head, n); ++i) out.gradient[i].setZero();
  for (std::size_t i = 0; i < std::min(fixed.tail, n); ++i) out.gradient[n - 1 - i].setZero();
  parts.total = out.value;
  if (breakdown != nullptr) *breakdown = parts;
  return out;
}

}  // namespace riskplan
