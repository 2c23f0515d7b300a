#pragma once

#include <string>
#include <vector>

namespace riskplan {

/// Every tunable of the planning stack. Grid quantities (n_ref, s_f, r_d, rho_dyn)
/// are in world units; with the default resolution of 1.0 these are cells.
struct PlannerParams {
  // Search.
  double lambda = 150.0;   ///< risk-value weight in the node cost
  double alpha = 20.0;     ///< guidance-term weight in the node cost
  double n_ref = 4.0;      ///< lateral reference distance for the rear-bypass case
  double epsilon = 1e-6;   ///< regularizer of the direction factor
  double rho_dyn = 10.0;   ///< radius within which a moving obstacle drives the guidance case

  // Risk model.
  double k1 = 1.0;         ///< velocity weight of the dynamic risk model

  // Trajectory.
  double r_thresh = 0.02;  ///< risk threshold for control-point shifting and the dynamic-risk gate
  double r_d = 0.5;        ///< control-point displacement along the descent direction
  double s_f = 1.5;        ///< static safety clearance
  double v_m = 2.0;
  double a_m = 3.0;
  double dt = 0.1;         ///< uniform knot spacing
  double C = 2.0;          ///< dynamic safety distance
  double lambda_s = 1.0;
  double lambda_c = 5000.0;
  double lambda_d = 1.0;
  double lambda_r = 10.0;

  // Compatibility switches for the literal printed forms.
  bool literal_dynamic_gradient = false;  ///< use the printed (inexact) dynamic-risk gradient
  bool backward_prediction = false;       ///< predict obstacles with p - v*dt*i

  friend bool operator==(const PlannerParams&, const PlannerParams&) = default;
};

/// Throws InvariantError naming the first violated constraint.
void validate(const PlannerParams& params);

/// Sets a numeric or boolean parameter by its serialized key. Returns false for
/// an unknown key.
bool set_param(PlannerParams& params, const std::string& key, double value);

/// True for keys stored as booleans.
bool is_flag_param(const std::string& key);

/// (key, value) pairs in serialized key order. Booleans are reported as 0/1.
std::vector<std::pair<std::string, double>> param_entries(const PlannerParams& params);

}  // namespace riskplan
