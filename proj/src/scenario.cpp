#include "riskplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "riskplan/ellipse.hpp"
#include "riskplan/rng.hpp"

namespace riskplan {

using nlohmann::json;

namespace {

constexpr struct {
  ObstacleClass cls;
  std::string_view name;
} kClassNames[] = {
    {ObstacleClass::StationaryStructure, "StationaryStructure"},
    {ObstacleClass::ContinuouslyDynamic, "ContinuouslyDynamic"},
    {ObstacleClass::TemporarilyStatic, "TemporarilyStatic"},
};

void require(bool ok, const std::string& what) {
  if (!ok) throw InvariantError("invariant violated: " + what);
}

}  // namespace

std::string_view to_string(ObstacleClass c) {
  for (const auto& e : kClassNames) {
    if (e.cls == c) return e.name;
  }
  return "?";
}

ObstacleClass parse_obstacle_class(std::string_view name) {
  for (const auto& e : kClassNames) {
    if (e.name == name) return e.cls;
  }
  throw InputError("unknown obstacle class '" + std::string(name) + "'");
}

void validate(const Obstacle& obs) {
  require(std::isfinite(obs.mu.x()) && std::isfinite(obs.mu.y()), "mu finite");
  require(obs.sigma_x > 0.0, "sigma_x > 0");
  require(obs.sigma_y > 0.0, "sigma_y > 0");
  require(obs.semantic_weight > 0.0, "weight > 0");
  require(obs.corner_weight >= 0.0, "corner_weight >= 0");
  require(std::isfinite(obs.velocity.x()) && std::isfinite(obs.velocity.y()), "velocity finite");
  if (obs.cls == ObstacleClass::StationaryStructure) {
    require(!obs.trigger.has_value(), "StationaryStructure has no trigger");
    require(!obs.moving(), "StationaryStructure velocity is zero");
  }
  if (obs.cls == ObstacleClass::TemporarilyStatic) {
    require(!obs.moving() || obs.trigger.has_value(),
            "TemporarilyStatic obstacle is static until triggered");
  }
  if (obs.trigger) require(obs.trigger->activation_distance > 0.0, "activation_distance > 0");
}

// --- GridMap ----------------------------------------------------------------

GridMap::GridMap(int width, int height, double resolution)
    : width_(width), height_(height), resolution_(resolution),
      occupancy_(static_cast<size_t>(width) * height, 0) {}

Cell GridMap::cell_of(const Vec2& p) const {
  return {static_cast<int>(std::floor(p.x() / resolution_)),
          static_cast<int>(std::floor(p.y() / resolution_))};
}

void GridMap::rasterize(const std::vector<Obstacle>& obstacles) {
  for (const auto& obs : obstacles) {
    const Cell lo = cell_of(obs.mu - Vec2(obs.sigma_x, obs.sigma_y));
    const Cell hi = cell_of(obs.mu + Vec2(obs.sigma_x, obs.sigma_y));
    for (int y = std::max(lo.y, 0); y <= std::min(hi.y, height_ - 1); ++y) {
      for (int x = std::max(lo.x, 0); x <= std::min(hi.x, width_ - 1); ++x) {
        if (inside_ellipse(center({x, y}), obs.mu, obs.sigma_x, obs.sigma_y)) set_occupied({x, y}, true);
      }
    }
  }
}

GridMap ScenarioConfig::grid() const {
  GridMap g(map.width, map.height, map.resolution);
  g.rasterize(obstacles);
  return g;
}

void validate(const ScenarioConfig& cfg) {
  require(cfg.map.width >= 2, "map.width >= 2");
  require(cfg.map.height >= 2, "map.height >= 2");
  require(cfg.map.resolution > 0.0, "map.resolution > 0");
  validate(cfg.params);
  std::vector<int> ids;
  for (const auto& o : cfg.obstacles) {
    validate(o);
    ids.push_back(o.id);
  }
  std::sort(ids.begin(), ids.end());
  require(std::adjacent_find(ids.begin(), ids.end()) == ids.end(), "obstacle ids unique");
  const GridMap g = cfg.grid();
  require(g.in_bounds(cfg.start), "start inside map");
  require(g.in_bounds(cfg.goal), "goal inside map");
  require(!g.occupied(cfg.start), "start cell unoccupied");
  require(!g.occupied(cfg.goal), "goal cell unoccupied");
}

// --- semantics --------------------------------------------------------------

SemanticTable SemanticTable::defaults() {
  using C = ObstacleClass;
  return SemanticTable({
      {"building", {C::StationaryStructure, 1.0}},
      {"parked_car", {C::TemporarilyStatic, 3.0}},
      {"person_standing", {C::TemporarilyStatic, 3.0}},
      {"person_walking", {C::ContinuouslyDynamic, 3.0}},
      {"tree", {C::StationaryStructure, 1.0}},
      {"vehicle_moving", {C::ContinuouslyDynamic, 3.0}},
      {"wall", {C::StationaryStructure, 1.0}},
  });
}

SemanticTable::SemanticTable(std::map<std::string, SemanticEntry> entries,
                             std::optional<SemanticEntry> fallback)
    : entries_(std::move(entries)), fallback_(fallback) {
  double max_static = 0.0;
  double min_temp = kInf;
  for (const auto& [label, e] : entries_) {
    require(e.weight > 0.0, "semantic weight of '" + label + "' > 0");
    if (e.cls == ObstacleClass::StationaryStructure) max_static = std::max(max_static, e.weight);
    if (e.cls == ObstacleClass::TemporarilyStatic) min_temp = std::min(min_temp, e.weight);
  }
  require(min_temp > max_static || min_temp == kInf,
          "TemporarilyStatic weight exceeds StationaryStructure weight");
}

SemanticEntry classify_semantic(const std::string& label, const SemanticTable& table) {
  const auto it = table.entries().find(label);
  if (it != table.entries().end()) return it->second;
  if (table.fallback()) return *table.fallback();
  throw InputError("unknown semantic label '" + label + "'");
}

// --- generation -------------------------------------------------------------

double quantize(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

namespace {

// Same move rule as the planners: 8-connected, diagonal moves may not cut an
// occupied corner.
bool connected(const GridMap& g, Cell start, Cell goal) {
  std::vector<std::uint8_t> seen(g.cell_count(), 0);
  std::deque<Cell> queue{start};
  seen[g.index(start)] = 1;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    if (c == goal) return true;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const Cell n{c.x + dx, c.y + dy};
        if ((dx == 0 && dy == 0) || !g.in_bounds(n) || g.occupied(n) || seen[g.index(n)]) continue;
        if (dx != 0 && dy != 0 && (g.occupied({c.x + dx, c.y}) || g.occupied({c.x, c.y + dy}))) continue;
        seen[g.index(n)] = 1;
        queue.push_back(n);
      }
    }
  }
  return false;
}

std::vector<Cell> footprint_cells(const GridMap& g, const Obstacle& o) {
  GridMap scratch(g.width(), g.height(), g.resolution());
  scratch.rasterize({o});
  std::vector<Cell> out;
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      if (scratch.occupied({x, y})) out.push_back({x, y});
    }
  }
  return out;
}

constexpr int kAttemptsPerObstacle = 200;

}  // namespace

ScenarioConfig generate_random_map(int width, int height, int n_static, int n_risky,
                                   std::uint64_t seed) {
  if (width < 2 || height < 2) throw InputError("map must be at least 2x2");
  if (n_static < 0 || n_risky < 0) throw InputError("obstacle counts must be non-negative");

  ScenarioConfig cfg;
  cfg.map = {width, height, 1.0};
  cfg.seed = seed;
  const int margin = std::min({2, (width - 2) / 2, (height - 2) / 2});
  cfg.start = {margin, margin};
  cfg.goal = {width - 1 - margin, height - 1 - margin};

  Rng rng(seed);
  GridMap grid(width, height, 1.0);
  const double scale = std::min(width, height) / 50.0;
  const Vec2 s = grid.center(cfg.start);
  const Vec2 e = grid.center(cfg.goal);
  const Vec2 lateral = Vec2(-(e - s).y(), (e - s).x()).normalized();
  int next_id = 1;

  auto try_place = [&](Obstacle o) {
    o.id = next_id;
    for (double* v : {&o.mu.x(), &o.mu.y(), &o.sigma_x, &o.sigma_y}) *v = quantize(*v);
    const auto cells = footprint_cells(grid, o);
    if (cells.empty()) return false;
    for (const Cell c : cells) {
      if (grid.occupied(c) || c == cfg.start || c == cfg.goal) return false;
      // Keep a free ring around start and goal.
      if (std::max(std::abs(c.x - cfg.start.x), std::abs(c.y - cfg.start.y)) <= 1 && margin > 0) return false;
      if (std::max(std::abs(c.x - cfg.goal.x), std::abs(c.y - cfg.goal.y)) <= 1 && margin > 0) return false;
    }
    for (const Cell c : cells) grid.set_occupied(c, true);
    if (!connected(grid, cfg.start, cfg.goal)) {
      for (const Cell c : cells) grid.set_occupied(c, false);
      return false;
    }
    cfg.obstacles.push_back(o);
    ++next_id;
    return true;
  };

  // Risky obstacles first so they sit on the direct route.
  for (int i = 0; i < n_risky; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kAttemptsPerObstacle && !placed; ++attempt) {
      const double lo = 0.25 + 0.5 * i / std::max(n_risky, 1);
      const double t = rng.uniform(lo, lo + 0.5 / std::max(n_risky, 1));
      const double off = rng.uniform(-3.0, 3.0) * scale;
      const Vec2 p = s + t * (e - s) + off * lateral;
      Obstacle o;
      o.cls = ObstacleClass::TemporarilyStatic;
      o.mu = grid.center(grid.cell_of(p));
      o.sigma_x = std::max(0.5, rng.uniform(0.8, 1.5) * std::max(scale, 0.5));
      o.sigma_y = std::max(0.5, rng.uniform(0.8, 1.5) * std::max(scale, 0.5));
      o.semantic_weight = 3.0;
      o.trigger = BehaviorTrigger{quantize(rng.uniform(4.0, 6.0)), Vec2(-0.5, -0.3)};
      placed = try_place(o);
    }
    if (!placed) throw InputError("could not place risky obstacle " + std::to_string(i + 1));
  }

  for (int i = 0; i < n_static; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kAttemptsPerObstacle && !placed; ++attempt) {
      Obstacle o;
      o.cls = ObstacleClass::StationaryStructure;
      o.mu = grid.center({rng.uniform_int(0, width - 1), rng.uniform_int(0, height - 1)});
      const double hi = std::max(0.5, 3.0 * scale);
      const double lo = std::min(hi, std::max(0.5, 1.0 * scale));
      o.sigma_x = rng.uniform(lo, hi);
      o.sigma_y = rng.uniform(lo, hi);
      o.semantic_weight = 1.0;
      placed = try_place(o);
    }
    if (!placed) throw InputError("could not place static obstacle " + std::to_string(i + 1));
  }
  return cfg;
}

// --- serialization ----------------------------------------------------------

namespace {

json vec_json(const Vec2& v) { return json::array({quantize(v.x()), quantize(v.y())}); }

class Reader {
 public:
  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw InputError(path + ": " + what);
  }

  static const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing field");
    return *it;
  }

  static double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected number");
    return j.get<double>();
  }

  static std::int64_t integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected integer");
    return j.get<std::int64_t>();
  }

  static Vec2 vec(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) fail(path, "expected array of 2 numbers");
    return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
  }

  static Cell cell(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) fail(path, "expected array of 2 integers");
    return {static_cast<int>(integer(j[0], path + "[0]")), static_cast<int>(integer(j[1], path + "[1]"))};
  }

  static void only_keys(const json& obj, std::initializer_list<std::string_view> keys, const std::string& path) {
    for (const auto& [k, v] : obj.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(path + "." + k, "unknown field");
    }
  }
};

Obstacle obstacle_from_json(const json& j, const std::string& path) {
  using R = Reader;
  if (!j.is_object()) R::fail(path, "expected object");
  R::only_keys(j, {"class", "corner_weight", "id", "label", "mu", "sigma", "trigger", "velocity", "weight"}, path);
  Obstacle o;
  o.id = static_cast<int>(R::integer(R::field(j, "id", path), path + ".id"));
  if (j.contains("class")) {
    const auto& c = j.at("class");
    if (!c.is_string()) R::fail(path + ".class", "expected string");
    try {
      o.cls = parse_obstacle_class(c.get<std::string>());
    } catch (const InputError& e) {
      R::fail(path + ".class", e.what());
    }
  } else if (j.contains("label")) {
    const auto& l = j.at("label");
    if (!l.is_string()) R::fail(path + ".label", "expected string");
    try {
      const auto entry = classify_semantic(l.get<std::string>(), SemanticTable::defaults());
      o.cls = entry.cls;
      o.semantic_weight = entry.weight;
    } catch (const InputError& e) {
      R::fail(path + ".label", e.what());
    }
  } else {
    R::fail(path + ".class", "missing field");
  }
  o.mu = R::vec(R::field(j, "mu", path), path + ".mu");
  const Vec2 sigma = R::vec(R::field(j, "sigma", path), path + ".sigma");
  o.sigma_x = sigma.x();
  o.sigma_y = sigma.y();
  if (j.contains("velocity")) o.velocity = R::vec(j.at("velocity"), path + ".velocity");
  if (j.contains("weight")) {
    o.semantic_weight = R::number(j.at("weight"), path + ".weight");
  } else if (!j.contains("label")) {
    R::fail(path + ".weight", "missing field");
  }
  if (j.contains("corner_weight")) o.corner_weight = R::number(j.at("corner_weight"), path + ".corner_weight");
  if (j.contains("trigger") && !j.at("trigger").is_null()) {
    const auto& t = j.at("trigger");
    const std::string tp = path + ".trigger";
    if (!t.is_object()) R::fail(tp, "expected object");
    R::only_keys(t, {"activation_distance", "post_velocity"}, tp);
    BehaviorTrigger trig;
    trig.activation_distance = R::number(R::field(t, "activation_distance", tp), tp + ".activation_distance");
    trig.post_velocity = R::vec(R::field(t, "post_velocity", tp), tp + ".post_velocity");
    o.trigger = trig;
  }
  return o;
}

}  // namespace

std::string to_json(const ScenarioConfig& cfg) {
  json j;
  j["map"] = {{"width", cfg.map.width}, {"height", cfg.map.height}, {"resolution", quantize(cfg.map.resolution)}};
  j["start"] = json::array({cfg.start.x, cfg.start.y});
  j["goal"] = json::array({cfg.goal.x, cfg.goal.y});
  j["seed"] = cfg.seed;
  json obstacles = json::array();
  for (const auto& o : cfg.obstacles) {
    json jo;
    jo["id"] = o.id;
    jo["class"] = std::string(to_string(o.cls));
    jo["mu"] = vec_json(o.mu);
    jo["sigma"] = vec_json({o.sigma_x, o.sigma_y});
    jo["velocity"] = vec_json(o.velocity);
    jo["weight"] = quantize(o.semantic_weight);
    if (o.corner_weight != 0.0) jo["corner_weight"] = quantize(o.corner_weight);
    if (o.trigger) {
      jo["trigger"] = {{"activation_distance", quantize(o.trigger->activation_distance)},
                       {"post_velocity", vec_json(o.trigger->post_velocity)}};
    }
    obstacles.push_back(std::move(jo));
  }
  j["obstacles"] = std::move(obstacles);
  json params = json::object();
  for (const auto& [k, v] : param_entries(cfg.params)) {
    if (is_flag_param(k)) {
      params[k] = v != 0.0;
    } else {
      params[k] = quantize(v);
    }
  }
  j["params"] = std::move(params);
  return j.dump(2) + "\n";
}

ScenarioConfig from_json(const std::string& text) {
  using R = Reader;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("$: malformed document: ") + e.what());
  }
  const std::string root = "$";
  if (!j.is_object()) R::fail(root, "expected object");
  R::only_keys(j, {"goal", "map", "obstacles", "params", "seed", "start"}, root);

  ScenarioConfig cfg;
  const auto& m = R::field(j, "map", root);
  R::only_keys(m, {"height", "resolution", "width"}, "$.map");
  cfg.map.width = static_cast<int>(R::integer(R::field(m, "width", "$.map"), "$.map.width"));
  cfg.map.height = static_cast<int>(R::integer(R::field(m, "height", "$.map"), "$.map.height"));
  cfg.map.resolution = R::number(R::field(m, "resolution", "$.map"), "$.map.resolution");
  cfg.start = R::cell(R::field(j, "start", root), "$.start");
  cfg.goal = R::cell(R::field(j, "goal", root), "$.goal");
  const auto& seed = R::field(j, "seed", root);
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    R::fail("$.seed", "expected non-negative integer");
  }
  cfg.seed = seed.get<std::uint64_t>();

  const auto& obs = R::field(j, "obstacles", root);
  if (!obs.is_array()) R::fail("$.obstacles", "expected array");
  for (size_t i = 0; i < obs.size(); ++i) {
    cfg.obstacles.push_back(obstacle_from_json(obs[i], "$.obstacles[" + std::to_string(i) + "]"));
  }

  if (j.contains("params")) {
    const auto& p = j.at("params");
    if (!p.is_object()) R::fail("$.params", "expected object");
    for (const auto& [k, v] : p.items()) {
      const std::string path = "$.params." + k;
      double value = 0.0;
      if (is_flag_param(k)) {
        if (!v.is_boolean()) R::fail(path, "expected boolean");
        value = v.get<bool>() ? 1.0 : 0.0;
      } else {
        value = R::number(v, path);
      }
      if (!set_param(cfg.params, k, value)) R::fail(path, "unknown field");
    }
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError(path.string() + ": cannot write file");
  out << to_json(cfg);
}

}  // namespace riskplan
