#include "riskplan/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace riskplan {
namespace {

// de Boor on knots t_j = origin + j * dt. `t` is absolute.
Vec2 de_boor(std::span<const Vec2> cps, int degree, double dt, double origin, double t) {
  const int n = static_cast<int>(cps.size());
  // Span index k with t_k <= t < t_{k+1}, clamped to the valid range.
  int k = static_cast<int>(std::floor((t - origin) / dt));
  k = std::clamp(k, degree, n - 1);
  std::vector<Vec2> d(cps.begin() + (k - degree), cps.begin() + (k + 1));
  for (int r = 1; r <= degree; ++r) {
    for (int j = degree; j >= r; --j) {
      const double left = origin + (j + k - degree) * dt;
      const double right = origin + (j + 1 + k - r) * dt;
      const double a = (t - left) / (right - left);
      d[j] = (1.0 - a) * d[j - 1] + a * d[j];
    }
  }
  return d[degree];
}

}  // namespace

std::vector<Vec2> BSplineTrajectory::derivative_points(int order) const {
  std::vector<Vec2> pts = control_points;
  for (int k = 0; k < order && !pts.empty(); ++k) {
    std::vector<Vec2> next;
    next.reserve(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) next.push_back((pts[i + 1] - pts[i]) / dt);
    pts = std::move(next);
  }
  return pts;
}

void validate(const BSplineTrajectory& traj) {
  if (traj.degree < 1) throw InvariantError("invariant violated: degree >= 1");
  if (!(traj.dt > 0.0)) throw InvariantError("invariant violated: dt > 0");
  if (static_cast<int>(traj.size()) < traj.degree + 1) throw InvariantError("invariant violated: N_c >= degree + 1");
}

Vec2 evaluate(const BSplineTrajectory& traj, double t, int order) {
  validate(traj);
  if (order < 0 || order > traj.degree) throw InputError("derivative order out of range");
  const double end = traj.duration();
  if (!(t >= 0.0 && t <= end)) {
    throw InputError("time " + std::to_string(t) + " outside [0, " + std::to_string(end) + "]");
  }
  const auto pts = traj.derivative_points(order);
  // The k-th derivative is a degree - k spline on the knot vector shifted by k.
  const double origin = order * traj.dt;
  return de_boor(pts, traj.degree - order, traj.dt, origin, t + traj.degree * traj.dt);
}

std::span<const Vec2> active_control_points(const BSplineTrajectory& traj, double t) {
  validate(traj);
  const int n = static_cast<int>(traj.size());
  int k = static_cast<int>(std::floor(t / traj.dt)) + traj.degree;
  k = std::clamp(k, traj.degree, n - 1);
  return std::span<const Vec2>(traj.control_points).subspan(k - traj.degree, traj.degree + 1);
}

std::vector<Vec2> resample_polyline(std::span<const Vec2> points, double spacing) {
  if (points.empty()) return {};
  if (!(spacing > 0.0)) throw InputError("resample spacing must be > 0");
  std::vector<Vec2> out{points.front()};
  double carry = 0.0;  // arc length since the last emitted point
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vec2 a = points[i - 1];
    const Vec2 b = points[i];
    const double seg = (b - a).norm();
    double s = spacing - carry;
    while (s < seg - 1e-12) {
      out.push_back(a + (b - a) * (s / seg));
      s += spacing;
    }
    carry = seg - (s - spacing);
  }
  if ((out.back() - points.back()).norm() > 1e-9) {
    // Avoid a sliver final interval.
    if ((out.back() - points.back()).norm() < 0.25 * spacing && out.size() > 1) out.pop_back();
    out.push_back(points.back());
  } else {
    out.back() = points.back();
  }
  return out;
}

BSplineTrajectory fit_initial_spline(std::span<const Vec2> points, double dt, int degree) {
  if (points.size() < 2) throw InputError("path needs at least two points");
  if (degree < 1 || degree % 2 == 0) throw InputError("fit_initial_spline supports odd degrees only");
  if (!(dt > 0.0)) throw InputError("dt must be > 0");

  const int pad = (degree - 1) / 2;
  BSplineTrajectory traj;
  traj.degree = degree;
  traj.dt = dt;
  const Vec2 head = points[1] - points[0];
  const Vec2 tail = points[points.size() - 1] - points[points.size() - 2];
  for (int j = pad; j >= 1; --j) traj.control_points.push_back(points[0] - j * head);
  traj.control_points.insert(traj.control_points.end(), points.begin(), points.end());
  for (int j = 1; j <= pad; ++j) traj.control_points.push_back(points.back() + j * tail);

  // Short paths: pad further with collinear points until N_c >= degree + 1.
  while (static_cast<int>(traj.size()) < degree + 1) {
    traj.control_points.insert(traj.control_points.begin(), traj.control_points.front() - head);
    traj.control_points.push_back(traj.control_points.back() + tail);
  }
  return traj;
}

BSplineTrajectory fit_initial_spline(const Path& path, const GridMap& map, double dt, int degree) {
  if (path.cells.size() < 2) throw InputError("degenerate path: fewer than two cells");
  std::vector<Vec2> pts;
  pts.reserve(path.cells.size());
  for (const Cell c : path.cells) pts.push_back(map.center(c));
  return fit_initial_spline(pts, dt, degree);
}

ShiftResult init_shift_control_points(const BSplineTrajectory& traj, const RiskEvaluator& risk, double r_thresh,
                                      double r_d, std::size_t fixed) {
  if (r_d < 0.0) throw InputError("r_d must be >= 0");
  ShiftResult out{traj, {}, {}};
  const std::size_t n = traj.size();
  for (std::size_t i = fixed; i + fixed < n; ++i) {
    const Vec2 q = traj.control_points[i];
    const RiskSample s = risk(q);
    if (s.value < r_thresh) continue;
    const double gn = s.gradient.norm();
    if (gn < 1e-12) {
      out.flagged.push_back(i);
      continue;
    }
    out.traj.control_points[i] = q - s.gradient / gn * r_d;
    out.shifted.push_back(i);
  }
  return out;
}

}  // namespace riskplan
