#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskplan/params.hpp"
#include "riskplan/types.hpp"

namespace riskplan {

enum class ObstacleClass { StationaryStructure, ContinuouslyDynamic, TemporarilyStatic };

std::string_view to_string(ObstacleClass c);
/// Throws InputError for an unknown name.
ObstacleClass parse_obstacle_class(std::string_view name);

struct BehaviorTrigger {
  double activation_distance = 0.0;  ///< robot distance at which the obstacle starts moving
  Vec2 post_velocity = Vec2::Zero();

  friend bool operator==(const BehaviorTrigger&, const BehaviorTrigger&) = default;
};

struct Obstacle {
  int id = 0;
  ObstacleClass cls = ObstacleClass::StationaryStructure;
  Vec2 mu = Vec2::Zero();
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  Vec2 velocity = Vec2::Zero();  ///< zero while the obstacle is in a static state
  double semantic_weight = 1.0;
  std::optional<BehaviorTrigger> trigger;
  /// Weight of the extra risk sources placed at the footprint's bounding-box
  /// corners. Zero disables them. Only meaningful for stationary structures.
  double corner_weight = 0.0;

  bool moving() const { return velocity.x() != 0.0 || velocity.y() != 0.0; }
  /// Obstacles whose proximity counts toward high-risk clearance.
  bool high_risk() const { return cls == ObstacleClass::TemporarilyStatic || moving(); }

  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

/// Throws InvariantError naming the violated invariant.
void validate(const Obstacle& obs);

/// Occupancy grid. Cell (x, y) covers [x*res, (x+1)*res) x [y*res, (y+1)*res);
/// its center is at ((x + 0.5) * res, (y + 0.5) * res).
class GridMap {
 public:
  GridMap() = default;
  GridMap(int width, int height, double resolution);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool occupied(Cell c) const { return occupancy_[index(c)] != 0; }
  void set_occupied(Cell c, bool v) { occupancy_[index(c)] = v ? 1 : 0; }
  size_t index(Cell c) const { return static_cast<size_t>(c.y) * width_ + c.x; }
  size_t cell_count() const { return occupancy_.size(); }

  Vec2 center(Cell c) const { return {(c.x + 0.5) * resolution_, (c.y + 0.5) * resolution_}; }
  /// Cell containing `p` (may be out of bounds).
  Cell cell_of(const Vec2& p) const;

  /// Marks every cell whose center lies inside an obstacle's 1-sigma ellipse.
  void rasterize(const std::vector<Obstacle>& obstacles);

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  std::vector<std::uint8_t> occupancy_;
};

struct MapSpec {
  int width = 50;
  int height = 50;
  double resolution = 1.0;

  friend bool operator==(const MapSpec&, const MapSpec&) = default;
};

struct ScenarioConfig {
  MapSpec map;
  std::vector<Obstacle> obstacles;
  Cell start;
  Cell goal;
  std::uint64_t seed = 0;
  PlannerParams params;

  /// Occupancy grid for the obstacles in their current positions.
  GridMap grid() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Throws InvariantError for any violated scenario invariant.
void validate(const ScenarioConfig& cfg);

// --- semantic classification -------------------------------------------------

struct SemanticEntry {
  ObstacleClass cls;
  double weight;
};

class SemanticTable {
 public:
  /// Built-in labels with the default weights (structures 1.0, everything that
  /// can move 3.0).
  static SemanticTable defaults();

  /// Throws InvariantError unless every TemporarilyStatic weight exceeds every
  /// StationaryStructure weight.
  explicit SemanticTable(std::map<std::string, SemanticEntry> entries,
                         std::optional<SemanticEntry> fallback = std::nullopt);

  const std::map<std::string, SemanticEntry>& entries() const { return entries_; }
  const std::optional<SemanticEntry>& fallback() const { return fallback_; }

 private:
  std::map<std::string, SemanticEntry> entries_;
  std::optional<SemanticEntry> fallback_;
};

/// Class and semantic weight for a label. Unknown labels resolve to the table's
/// fallback when it has one, otherwise throw InputError naming the label.
SemanticEntry classify_semantic(const std::string& label, const SemanticTable& table);

// --- generation and files ---------------------------------------------------

/// Random block world: `n_static` stationary structures anywhere, `n_risky`
/// temporarily static obstacles (with triggers) near the start-goal line.
/// Footprints never overlap and never cover start or goal; the result is
/// connected. Throws InputError when placement fails after bounded retries.
ScenarioConfig generate_random_map(int width, int height, int n_static, int n_risky,
                                   std::uint64_t seed);

/// Rounds to 9 significant decimal digits, the precision of the file format.
double quantize(double v);

std::string to_json(const ScenarioConfig& cfg);
/// Throws InputError with a field path on schema violations and
/// InvariantError on invariant violations.
ScenarioConfig from_json(const std::string& text);

ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path);

}  // namespace riskplan
