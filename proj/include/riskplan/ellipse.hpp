#pragma once

#include "riskplan/types.hpp"

namespace riskplan {

/// Closest-point query result against an axis-aligned ellipse boundary.
struct EllipseDistance {
  double signed_distance = 0.0;  ///< negative inside
  Vec2 closest;                  ///< closest boundary point, world frame
  Vec2 normal;                   ///< outward unit normal at `closest`; also d(signed_distance)/dp
};

/// Exact distance from `p` to the boundary of the axis-aligned ellipse centered at
/// `center` with semi-axes (`ax`, `ay`). Uses bisection on the closest-point
/// parameter (Eberly), which converges to machine precision for interior and
/// exterior points alike.
EllipseDistance ellipse_distance(const Vec2& p, const Vec2& center, double ax, double ay);

/// True when `p` lies inside or on the ellipse.
inline bool inside_ellipse(const Vec2& p, const Vec2& center, double ax, double ay) {
  const double u = (p.x() - center.x()) / ax;
  const double v = (p.y() - center.y()) / ay;
  return u * u + v * v <= 1.0;
}

}  // namespace riskplan
