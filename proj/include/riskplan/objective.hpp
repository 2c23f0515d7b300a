#pragma once

#include <cstddef>
#include <vector>

#include "riskplan/bspline.hpp"
#include "riskplan/params.hpp"
#include "riskplan/riskfield.hpp"

namespace riskplan {

/// A penalty value and its gradient with respect to every control point.
struct CostResult {
  double value = 0.0;
  std::vector<Vec2> gradient;
  std::size_t degenerate = 0;  ///< evaluations that needed a fallback direction

  explicit CostResult(std::size_t n = 0) : gradient(n, Vec2::Zero()) {}
};

/// Cubic hinge g(x) = max(0, x)^3, C2 at the activation point.
inline double hinge3(double x) { return x > 0.0 ? x * x * x : 0.0; }
inline double hinge3_deriv(double x) { return x > 0.0 ? 3.0 * x * x : 0.0; }

/// Sum of squared acceleration and jerk control points.
CostResult cost_smoothness(const BSplineTrajectory& traj);

/// sum_i sum_j max(s_f - d_ij, 0)^3 with d_ij the signed distance from Q_i to
/// obstacle j's footprint boundary. Obstacles are taken at their current
/// positions; pairs that cannot be within s_f are skipped.
CostResult cost_collision(const BSplineTrajectory& traj, const std::vector<Obstacle>& obstacles, double s_f);

/// sum g(|V|^2 - v_m^2) + sum g(|A|^2 - a_m^2).
CostResult cost_dynamic_feasibility(const BSplineTrajectory& traj, double v_m, double a_m);

/// For control points whose risk is at least `r_thresh`:
///   sum_j g(C - |Q_i - P_j(i)|),  P_j(i) = p_j + v_j * dt * i
/// (p_j - v_j * dt * i with `backward`). Index i = 0 is the first control point;
/// dt is the trajectory knot spacing. Static obstacles in `obstacles` are ignored.
CostResult cost_dynamic_risk(const BSplineTrajectory& traj, const std::vector<Obstacle>& obstacles,
                             const RiskEvaluator& risk, double r_thresh, double C, bool backward = false);

struct ObjectiveWeights {
  double lambda_s = 1.0;
  double lambda_c = 5000.0;
  double lambda_d = 1.0;
  double lambda_r = 10.0;
  double s_f = 1.5;
  double v_m = 2.0;
  double a_m = 3.0;
  double C = 2.0;
  double r_thresh = 0.02;
  double r_d = 0.5;
  bool backward_prediction = false;

  static ObjectiveWeights from(const PlannerParams& p) {
    return {p.lambda_s, p.lambda_c, p.lambda_d, p.lambda_r, p.s_f, p.v_m,
            p.a_m,      p.C,        p.r_thresh, p.r_d,      p.backward_prediction};
  }
};

struct ObjectiveBreakdown {
  double smoothness = 0.0;
  double collision = 0.0;
  double feasibility = 0.0;
  double risk = 0.0;
  double total = 0.0;
};

/// Control points excluded from optimization at each end.
struct FixedEnds {
  std::size_t head = 0;
  std::size_t tail = 0;
};

/// J = lambda_s J_s + lambda_c J_c + lambda_d J_d + lambda_r J_r. Gradients of
/// the fixed control points are zeroed. Terms with a zero weight are not
/// evaluated.
CostResult total_objective(const BSplineTrajectory& traj, const ObjectiveWeights& weights,
                           const std::vector<Obstacle>& obstacles, const RiskEvaluator& risk, FixedEnds fixed,
                           ObjectiveBreakdown* breakdown = nullptr);

}  // namespace riskplan
