#include "riskplan/ellipse.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace riskplan {
namespace {

double robust_length(double a, double b) { return std::hypot(a, b); }

// Root of F(s) = (r0 z0 / (s + r0))^2 + (z1 / (s + 1))^2 - 1 on [z1 - 1, |(r0 z0, z1)| - 1].
double ellipse_root(double r0, double z0, double z1, double g) {
  const double n0 = r0 * z0;
  double s0 = z1 - 1.0;
  double s1 = g < 0.0 ? 0.0 : robust_length(n0, z1) - 1.0;
  double s = 0.0;
  for (int i = 0; i < 1100; ++i) {
    s = 0.5 * (s0 + s1);
    if (s == s0 || s == s1) break;
    const double ratio0 = n0 / (s + r0);
    const double ratio1 = z1 / (s + 1.0);
    g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
    if (g > 0.0) {
      s0 = s;
    } else if (g < 0.0) {
      s1 = s;
    } else {
      break;
    }
  }
  return s;
}

// First-quadrant query with e0 >= e1 > 0 and y0, y1 >= 0. Returns the unsigned
// distance and writes the closest point.
double quadrant_distance(double e0, double e1, double y0, double y1, double& x0, double& x1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      const double g = z0 * z0 + z1 * z1 - 1.0;
      if (g != 0.0) {
        const double r0 = (e0 / e1) * (e0 / e1);
        const double sbar = ellipse_root(r0, z0, z1, g);
        x0 = r0 * y0 / (sbar + r0);
        x1 = y1 / (sbar + 1.0);
        return std::hypot(x0 - y0, x1 - y1);
      }
      x0 = y0;
      x1 = y1;
      return 0.0;
    }
    x0 = 0.0;
    x1 = e1;
    return std::abs(y1 - e1);
  }
  const double numer0 = e0 * y0;
  const double denom0 = e0 * e0 - e1 * e1;
  if (numer0 < denom0) {
    const double xde0 = numer0 / denom0;
    x0 = e0 * xde0;
    x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
    return std::hypot(x0 - y0, x1);
  }
  x0 = e0;
  x1 = 0.0;
  return std::abs(y0 - e0);
}

}  // namespace

EllipseDistance ellipse_distance(const Vec2& p, const Vec2& center, double ax, double ay) {
  const Vec2 rel = p - center;
  const double sx = rel.x() < 0.0 ? -1.0 : 1.0;
  const double sy = rel.y() < 0.0 ? -1.0 : 1.0;
  double y0 = std::abs(rel.x());
  double y1 = std::abs(rel.y());
  double e0 = ax;
  double e1 = ay;
  const bool swapped = e0 < e1;
  if (swapped) {
    std::swap(e0, e1);
    std::swap(y0, y1);
  }

  double x0 = 0.0;
  double x1 = 0.0;
  const double dist = quadrant_distance(e0, e1, y0, y1, x0, x1);
  const double q0 = y0 / e0;
  const double q1 = y1 / e1;
  const bool inside = q0 * q0 + q1 * q1 < 1.0;

  // Outward normal of the implicit function at the closest point.
  double n0 = x0 / (e0 * e0);
  double n1 = x1 / (e1 * e1);
  if (swapped) {
    std::swap(x0, x1);
    std::swap(n0, n1);
  }
  const double nn = std::hypot(n0, n1);

  EllipseDistance out;
  out.signed_distance = inside ? -dist : dist;
  out.closest = center + Vec2(sx * x0, sy * x1);
  out.normal = Vec2(sx * n0 / nn, sy * n1 / nn);
  return out;
}

}  // namespace riskplan
