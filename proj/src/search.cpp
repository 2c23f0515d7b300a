#include "riskplan/search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>

#include "riskplan/ellipse.hpp"

namespace riskplan {
namespace {

struct OpenEntry {
  double f;
  double h;
  int y;
  int x;
};

struct OpenOrder {
  // std::priority_queue is a max-heap; invert for lexicographic minimum.
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    if (a.y != b.y) return a.y > b.y;
    return a.x > b.x;
  }
};

using OpenList = std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder>;

constexpr int kMoves[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};

bool can_move(const GridMap& map, Cell from, int dx, int dy) {
  const Cell to{from.x + dx, from.y + dy};
  if (!map.in_bounds(to) || map.occupied(to)) return false;
  if (dx != 0 && dy != 0) {
    if (map.occupied({from.x + dx, from.y}) || map.occupied({from.x, from.y + dy})) return false;
  }
  return true;
}

void check_endpoints(const GridMap& map, Cell start, Cell goal) {
  auto name = [](Cell c) { return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")"; };
  if (!map.in_bounds(start)) throw InputError("start " + name(start) + " outside map");
  if (!map.in_bounds(goal)) throw InputError("goal " + name(goal) + " outside map");
  if (map.occupied(start)) throw InputError("start " + name(start) + " is occupied");
  if (map.occupied(goal)) throw InputError("goal " + name(goal) + " is occupied");
}

struct SearchState {
  explicit SearchState(const GridMap& map)
      : g(map.cell_count(), kInf), h(map.cell_count(), 0.0), risk(map.cell_count(), 0.0),
        guidance(map.cell_count(), 0.0), f(map.cell_count(), kInf), parent(map.cell_count(), -1),
        closed(map.cell_count(), 0) {}

  std::vector<double> g, h, risk, guidance, f;
  std::vector<long> parent;
  std::vector<std::uint8_t> closed;
};

Path retrieve(const GridMap& map, const SearchState& s, Cell goal, std::size_t expansions) {
  Path path;
  long idx = static_cast<long>(map.index(goal));
  while (idx >= 0) {
    const Cell c{static_cast<int>(idx % map.width()), static_cast<int>(idx / map.width())};
    PathNode node{c, s.g[idx], s.h[idx], s.risk[idx], s.guidance[idx], s.f[idx], std::nullopt};
    if (s.parent[idx] >= 0) {
      const long p = s.parent[idx];
      node.parent = Cell{static_cast<int>(p % map.width()), static_cast<int>(p / map.width())};
    }
    path.cells.push_back(c);
    path.nodes.push_back(node);
    idx = s.parent[idx];
  }
  std::reverse(path.cells.begin(), path.cells.end());
  std::reverse(path.nodes.begin(), path.nodes.end());
  path.length = path_length(path.cells, map.resolution());
  path.expansions = expansions;
  return path;
}

}  // namespace

double path_length(const std::vector<Cell>& cells, double resolution) {
  double len = 0.0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const int dx = std::abs(cells[i].x - cells[i - 1].x);
    const int dy = std::abs(cells[i].y - cells[i - 1].y);
    len += resolution * std::sqrt(static_cast<double>(dx * dx + dy * dy));
  }
  return len;
}

Path r_astar(const GridMap& map, const RiskGrid& risk, const std::vector<Obstacle>& obstacles, Cell start,
             Cell goal, const SearchParams& params) {
  check_endpoints(map, start, goal);
  if (params.lambda < 0.0 || params.alpha < 0.0) throw InputError("lambda and alpha must be >= 0");

  std::vector<Obstacle> movers;
  for (const auto& o : obstacles) {
    if (o.moving()) movers.push_back(o);
  }
  const GuidanceConfig guide{params.n_ref, params.epsilon, params.rho_dyn, params.k1};
  const Vec2 goal_pt = map.center(goal);

  SearchState s(map);
  OpenList open;
  const std::size_t si = map.index(start);
  s.g[si] = 0.0;
  s.h[si] = (map.center(start) - goal_pt).norm();
  s.risk[si] = risk.at(start).value;
  s.f[si] = s.g[si] + s.h[si] + params.lambda * s.risk[si];
  open.push({s.f[si], s.h[si], start.y, start.x});

  std::size_t expansions = 0;
  while (!open.empty()) {
    const OpenEntry e = open.top();
    open.pop();
    const Cell cur{e.x, e.y};
    const std::size_t ci = map.index(cur);
    if (s.closed[ci] || e.f != s.f[ci] || e.h != s.h[ci]) continue;
    if (cur == goal) return retrieve(map, s, goal, expansions);
    s.closed[ci] = 1;
    ++expansions;

    const Vec2 p_curr = map.center(cur);
    for (const auto& m : kMoves) {
      if (!can_move(map, cur, m[0], m[1])) continue;
      const Cell next{cur.x + m[0], cur.y + m[1]};
      const std::size_t ni = map.index(next);
      if (s.closed[ni]) continue;
      const double g_temp = s.g[ci] + map.resolution() * std::sqrt(static_cast<double>(m[0] * m[0] + m[1] * m[1]));
      if (g_temp < s.g[ni]) {
        s.g[ni] = g_temp;
        s.parent[ni] = static_cast<long>(ci);
      }
      const Vec2 p_next = map.center(next);
      const RiskSample& rs = risk.at(next);
      s.h[ni] = (p_next - goal_pt).norm();
      s.risk[ni] = rs.value;
      s.guidance[ni] = guidance_term(p_next, p_curr, rs.gradient, movers, guide);
      s.f[ni] = s.g[ni] + s.h[ni] + params.lambda * s.risk[ni] + params.alpha * s.guidance[ni];
      open.push({s.f[ni], s.h[ni], next.y, next.x});
    }
  }
  throw NoPathError();
}

Path astar_baseline(const GridMap& map, Cell start, Cell goal) {
  check_endpoints(map, start, goal);
  const Vec2 goal_pt = map.center(goal);

  SearchState s(map);
  OpenList open;
  const std::size_t si = map.index(start);
  s.g[si] = 0.0;
  s.h[si] = (map.center(start) - goal_pt).norm();
  s.f[si] = s.g[si] + s.h[si];
  open.push({s.f[si], s.h[si], start.y, start.x});

  std::size_t expansions = 0;
  while (!open.empty()) {
    const OpenEntry e = open.top();
    open.pop();
    const Cell cur{e.x, e.y};
    const std::size_t ci = map.index(cur);
    if (s.closed[ci] || e.f != s.f[ci]) continue;
    if (cur == goal) return retrieve(map, s, goal, expansions);
    s.closed[ci] = 1;
    ++expansions;

    for (const auto& m : kMoves) {
      if (!can_move(map, cur, m[0], m[1])) continue;
      const Cell next{cur.x + m[0], cur.y + m[1]};
      const std::size_t ni = map.index(next);
      if (s.closed[ni]) continue;
      const double g_temp = s.g[ci] + map.resolution() * std::sqrt(static_cast<double>(m[0] * m[0] + m[1] * m[1]));
      if (g_temp >= s.g[ni]) continue;
      s.g[ni] = g_temp;
      s.parent[ni] = static_cast<long>(ci);
      s.h[ni] = (map.center(next) - goal_pt).norm();
      s.f[ni] = s.g[ni] + s.h[ni];
      open.push({s.f[ni], s.h[ni], next.y, next.x});
    }
  }
  throw NoPathError();
}

Path replan_on_change(const Path& /*prev*/, const GridMap& map, const RiskGrid& risk,
                      const std::vector<Obstacle>& obstacles, Cell current, Cell goal, const SearchParams& params) {
  return r_astar(map, risk, obstacles, current, goal, params);
}

double high_risk_clearance(const Vec2& p, const std::vector<Obstacle>& obstacles) {
  double best = kInf;
  for (const auto& o : obstacles) {
    if (!o.high_risk()) continue;
    best = std::min(best, ellipse_distance(p, o.mu, o.sigma_x, o.sigma_y).signed_distance);
  }
  return best;
}

PathMetrics path_metrics(const Path& path, const GridMap& map, const std::vector<Obstacle>& obstacles) {
  PathMetrics m;
  m.length = path_length(path.cells, map.resolution());
  for (const Cell c : path.cells) {
    m.min_high_risk_clearance = std::min(m.min_high_risk_clearance, high_risk_clearance(map.center(c), obstacles));
  }
  return m;
}

}  // namespace riskplan
