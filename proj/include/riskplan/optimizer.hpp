#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riskplan/objective.hpp"

namespace riskplan {

struct OptimizerOptions {
  int max_iters = 200;
  double grad_tol = 1e-6;      ///< on the infinity norm of the free-variable gradient
  double stall_tol = 1e-10;    ///< relative objective change counted as no progress
  int stall_iters = 5;         ///< consecutive no-progress iterations before stopping
  int memory = 8;              ///< L-BFGS history length
  double armijo = 1e-4;        ///< sufficient-decrease constant
  int max_backtracks = 50;
  double first_step = 0.1;     ///< largest control-point move of a steepest-descent trial step
  /// Control points held fixed at each end; defaults to the spline degree at
  /// both ends, which pins position, velocity and acceleration there.
  std::optional<FixedEnds> fixed;
};

struct OptimizerReport {
  std::vector<double> objective;  ///< J at the start and after every accepted step
  int iterations = 0;
  int steepest_fallbacks = 0;
  std::string termination;        ///< "gradient", "stall", "max_iters" or "line_search"
  ObjectiveBreakdown final_terms;
};

struct OptimizeResult {
  BSplineTrajectory traj;
  OptimizerReport report;
};

/// Quasi-Newton descent on the free control points. Every accepted step
/// satisfies the Armijo condition, so J never increases. Falls back to steepest
/// descent when the curvature pair is rejected or the quasi-Newton direction
/// fails the line search. Throws OptimizerError when J is not finite at the
/// initial trajectory.
OptimizeResult optimize(const BSplineTrajectory& traj, const ObjectiveWeights& weights,
                        const std::vector<Obstacle>& obstacles, const RiskEvaluator& risk,
                        const OptimizerOptions& opts = {});

}  // namespace riskplan
