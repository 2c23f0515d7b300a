#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "riskplan/params.hpp"
#include "riskplan/riskfield.hpp"
#include "riskplan/scenario.hpp"

namespace riskplan {

struct SearchParams {
  double lambda = 150.0;
  double alpha = 20.0;
  double n_ref = 4.0;
  double epsilon = 1e-6;
  double rho_dyn = 10.0;
  double k1 = 1.0;

  static SearchParams from(const PlannerParams& p) {
    return {p.lambda, p.alpha, p.n_ref, p.epsilon, p.rho_dyn, p.k1};
  }
};

/// Cost breakdown of a node at the time it was expanded.
/// f == g + h + lambda * risk + alpha * guidance.
struct PathNode {
  Cell cell;
  double g = 0.0;
  double h = 0.0;
  double risk = 0.0;
  double guidance = 0.0;
  double f = 0.0;
  std::optional<Cell> parent;
};

struct Path {
  std::vector<Cell> cells;    ///< start to goal, 8-connected
  std::vector<PathNode> nodes;  ///< parallel to `cells`
  double length = 0.0;        ///< world units
  std::size_t expansions = 0;
};

/// Euclidean arc length through the cell centers.
double path_length(const std::vector<Cell>& cells, double resolution);

/// Risk-informed best-first search. Nodes are ordered by
///   f = g + h + lambda * R + alpha * G
/// with ties broken on (f, h, row, column). g accumulates Euclidean step length
/// only; risk and guidance shape the expansion order, so the search is not
/// admissible and returns the first path that reaches the goal. Moves are
/// 8-connected and may not cut an occupied corner.
///
/// Throws InputError when start or goal is out of bounds or occupied, and
/// NoPathError when the open list runs dry.
Path r_astar(const GridMap& map, const RiskGrid& risk, const std::vector<Obstacle>& obstacles, Cell start,
             Cell goal, const SearchParams& params);

/// Textbook A* with the same move set, heuristic and tie-breaking.
Path astar_baseline(const GridMap& map, Cell start, Cell goal);

/// Full R-A* re-search from `current`; the previous plan is not reused.
Path replan_on_change(const Path& prev, const GridMap& map, const RiskGrid& risk,
                      const std::vector<Obstacle>& obstacles, Cell current, Cell goal, const SearchParams& params);

struct PathMetrics {
  double length = 0.0;
  /// Smallest signed distance from a path cell center to the footprint boundary
  /// of a high-risk obstacle (temporarily static or moving); kInf when there is
  /// none.
  double min_high_risk_clearance = kInf;
};

PathMetrics path_metrics(const Path& path, const GridMap& map, const std::vector<Obstacle>& obstacles);

/// Signed distance from `p` to the nearest high-risk footprint boundary (kInf if none).
double high_risk_clearance(const Vec2& p, const std::vector<Obstacle>& obstacles);

}  // namespace riskplan
