#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "riskplan/bspline.hpp"
#include "riskplan/objective.hpp"
#include "riskplan/riskfield.hpp"
#include "riskplan/search.hpp"
#include "riskplan/sim.hpp"

namespace riskplan {

/// Shortest round-trip-stable text for a number at file precision (9
/// significant digits); "inf" and "-inf" for infinities.
std::string format_number(double v);

/// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// x,y,value,grad_x,grad_y per cell center, row-major from the bottom row.
void write_field_csv(std::ostream& os, const RiskGrid& risk);

/// cell_x,cell_y,x,y,g,h,risk,guidance,f per path node.
void write_path_csv(std::ostream& os, const Path& path, double resolution);

/// t,x,y,vx,vy,ax,ay followed by the objective breakdown columns, sampled every
/// `sample_dt` seconds and at the end of the curve.
void write_trajectory_csv(std::ostream& os, const BSplineTrajectory& traj, double sample_dt,
                          const ObjectiveBreakdown& terms);

/// seed,pipeline,success,path_length,min_clearance,flight_s,collision_t,replans,reason.
/// Every column is a deterministic function of the inputs; wall-clock timing
/// goes through write_timing_csv instead.
void write_trials_csv(std::ostream& os, const std::vector<TrialResult>& trials);

/// seed,pipeline,planning_ms.
void write_timing_csv(std::ostream& os, const std::vector<TrialResult>& trials);

}  // namespace riskplan
