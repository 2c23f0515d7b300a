#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "riskplan/riskfield.hpp"
#include "riskplan/search.hpp"
#include "riskplan/types.hpp"

namespace riskplan {

/// Uniform B-spline. Knots sit at t_j = j * dt for j = 0 .. N_c + degree; the
/// curve is defined on [t_degree, t_{N_c}]. Public time arguments are relative
/// to t_degree, so the domain is [0, duration()].
struct BSplineTrajectory {
  int degree = 3;
  std::vector<Vec2> control_points;
  double dt = 0.1;

  std::size_t size() const { return control_points.size(); }
  double duration() const { return static_cast<double>(static_cast<int>(size()) - degree) * dt; }

  /// Finite-difference control points of the k-th derivative:
  /// V_i = (Q_{i+1} - Q_i) / dt, A_i = (V_{i+1} - V_i) / dt, J_i = (A_{i+1} - A_i) / dt.
  std::vector<Vec2> derivative_points(int order) const;
  std::vector<Vec2> velocity_points() const { return derivative_points(1); }
  std::vector<Vec2> acceleration_points() const { return derivative_points(2); }
  std::vector<Vec2> jerk_points() const { return derivative_points(3); }

  friend bool operator==(const BSplineTrajectory&, const BSplineTrajectory&) = default;
};

/// Throws InvariantError unless degree >= 1, dt > 0 and N_c >= degree + 1.
void validate(const BSplineTrajectory& traj);

/// Position (order 0) or derivative (order 1..degree) at relative time `t`.
/// Throws InputError when `t` is outside [0, duration()].
Vec2 evaluate(const BSplineTrajectory& traj, double t, int order = 0);

/// The degree + 1 control points that shape the curve at relative time `t`.
std::span<const Vec2> active_control_points(const BSplineTrajectory& traj, double t);

/// Points along the polyline every `spacing` world units of arc length, always
/// including both ends. The last interval may be shorter.
std::vector<Vec2> resample_polyline(std::span<const Vec2> points, double spacing);

/// Control points through `points` with linearly extrapolated phantom points at
/// both ends, so that the curve starts and ends exactly at the first and last
/// point and reproduces straight segments. Odd degree only. Throws InputError
/// for fewer than two points.
BSplineTrajectory fit_initial_spline(std::span<const Vec2> points, double dt, int degree = 3);
/// Same, through the cell centers of `path`.
BSplineTrajectory fit_initial_spline(const Path& path, const GridMap& map, double dt, int degree = 3);

struct ShiftResult {
  BSplineTrajectory traj;
  std::vector<std::size_t> shifted;  ///< indices moved along the descent direction
  std::vector<std::size_t> flagged;  ///< above threshold but with a vanishing gradient
};

/// Moves every free control point whose risk is at least `r_thresh` by `r_d`
/// along -grad R / |grad R|. The first and last `fixed` control points stay put.
ShiftResult init_shift_control_points(const BSplineTrajectory& traj, const RiskEvaluator& risk, double r_thresh,
                                      double r_d, std::size_t fixed);

}  // namespace riskplan
