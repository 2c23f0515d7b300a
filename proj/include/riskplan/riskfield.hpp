#pragma once

#include <functional>
#include <vector>

#include "riskplan/params.hpp"
#include "riskplan/scenario.hpp"
#include "riskplan/types.hpp"

namespace riskplan {

struct RiskSample {
  double value = 0.0;
  Vec2 gradient = Vec2::Zero();
};

/// Knobs of the superposed risk model.
struct RiskModel {
  double k1 = 1.0;                        ///< global velocity weight; per-obstacle override not modeled
  bool literal_dynamic_gradient = false;  ///< printed gradient form instead of the exact derivative
  /// Dynamic risk queries closer than this to the obstacle center are evaluated
  /// on the circle of this radius. Zero keeps the exact (singular) model.
  double min_dynamic_radius = 0.0;

  static RiskModel from(const PlannerParams& p, double resolution) {
    return {p.k1, p.literal_dynamic_gradient, 0.5 * resolution};
  }
};

/// Anisotropic Gaussian of the footprint covariance, scaled by the semantic
/// weight. The normalizer is 1/sqrt((2 pi)^3 det(Sigma)) even though the
/// covariance is 2x2; only the overall scale differs from a density.
RiskSample static_risk(const Vec2& p, const Obstacle& obs);

/// Velocity-skewed inverse-square risk:
///   R = k_d / |r|^2 * exp(k1 (v . r) / |r|),  r = p - mu.
/// The gradient is the exact derivative unless `literal_gradient` is set.
/// Throws SingularityError at r = 0.
RiskSample dynamic_risk(const Vec2& p, const Obstacle& obs, double k1, bool literal_gradient = false);

/// Four small Gaussians at the bounding-box corners of a structure's footprint,
/// each with weight `corner_weight` and standard deviation kCornerSigma.
RiskSample corner_risk(const Vec2& p, const Obstacle& obs);
inline constexpr double kCornerSigma = 1.0;

/// Contribution of one obstacle in its current state.
RiskSample obstacle_risk(const Vec2& p, const Obstacle& obs, const RiskModel& model);

/// Sum over all obstacles: static-state obstacles through static_risk (plus
/// corner sources), moving ones through dynamic_risk.
RiskSample total_risk(const Vec2& p, const std::vector<Obstacle>& obstacles, const RiskModel& model);

using RiskEvaluator = std::function<RiskSample(const Vec2&)>;

/// Evaluator bound to a snapshot of the obstacle list.
RiskEvaluator make_risk_evaluator(std::vector<Obstacle> obstacles, const RiskModel& model);

// --- direction factor and guidance ------------------------------------------

struct DirectionalContext {
  double delta = 0.0;   ///< signed along-velocity offset of the current node, scaled by |v|/(|v|+eps)
  double n_last = 0.0;  ///< lateral distance from the current node to the obstacle's motion line
  double n_ref = 0.0;
  double epsilon = 0.0;
  bool degenerate = false;  ///< obstacle velocity is zero
};

DirectionalContext direction_factor(const Vec2& p_curr, const Obstacle& obs, double n_ref, double epsilon);

struct GuidanceConfig {
  double n_ref = 4.0;
  double epsilon = 1e-6;
  double rho_dyn = 10.0;
  double k1 = 1.0;
};

/// Signed guidance cost of stepping from `p_curr` to `p_id`, given the risk
/// gradient at `p_id`. Away from moving obstacles it is grad . d_air, so steps
/// down the risk slope are rewarded. Within `rho_dyn` of a moving obstacle the
/// front/rear case split applies:
///   delta < 0                  -> grad . d_air
///   delta > 0, n_last >= n_ref -> v . d_air   (bypass behind the obstacle)
///   delta > 0, n_last <  n_ref -> grad . d_air
/// With several movers in range the one with the largest risk at `p_curr` decides.
double guidance_term(const Vec2& p_id, const Vec2& p_curr, const Vec2& grad_at_id,
                     const std::vector<Obstacle>& obstacles, const GuidanceConfig& cfg);

/// Same, evaluating the gradient at `p_id` from the obstacles directly.
double guidance_term(const Vec2& p_id, const Vec2& p_curr, const std::vector<Obstacle>& obstacles,
                     const GuidanceConfig& cfg, const RiskModel& model);

// --- baked grid -------------------------------------------------------------

class RiskGrid {
 public:
  RiskGrid() = default;
  RiskGrid(int width, int height, double resolution, double time);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  double time() const { return time_; }

  const RiskSample& at(Cell c) const { return cells_[index(c)]; }
  RiskSample& at(Cell c) { return cells_[index(c)]; }
  bool clamped(Cell c) const { return clamped_[index(c)] != 0; }
  void set_clamped(Cell c, bool v) { clamped_[index(c)] = v ? 1 : 0; }

  /// Cell with the largest value; ties go to the lowest (row, column).
  Cell argmax() const;

 private:
  size_t index(Cell c) const { return static_cast<size_t>(c.y) * width_ + c.x; }

  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  double time_ = 0.0;
  std::vector<RiskSample> cells_;
  std::vector<std::uint8_t> clamped_;
};

/// Evaluates total_risk at every cell center. Cells that contain a moving
/// obstacle's center are singular; they take the sample of their largest
/// non-singular neighbor and are flagged as clamped.
RiskGrid bake_risk_grid(const GridMap& map, const std::vector<Obstacle>& obstacles, const RiskModel& model,
                        double time = 0.0);

}  // namespace riskplan
