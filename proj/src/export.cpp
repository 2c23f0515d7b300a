#include "riskplan/export.hpp"

#include <cmath>
#include <cstdio>

namespace riskplan {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_field_csv(std::ostream& os, const RiskGrid& risk) {
  os << "x,y,value,grad_x,grad_y\n";
  const double res = risk.resolution();
  for (int y = 0; y < risk.height(); ++y) {
    for (int x = 0; x < risk.width(); ++x) {
      const RiskSample& s = risk.at({x, y});
      os << format_number((x + 0.5) * res) << ',' << format_number((y + 0.5) * res) << ','
         << format_number(s.value) << ',' << format_number(s.gradient.x()) << ',' << format_number(s.gradient.y())
         << '\n';
    }
  }
}

void write_path_csv(std::ostream& os, const Path& path, double resolution) {
  os << "cell_x,cell_y,x,y,g,h,risk,guidance,f\n";
  for (std::size_t i = 0; i < path.cells.size(); ++i) {
    const Cell c = path.cells[i];
    os << c.x << ',' << c.y << ',' << format_number((c.x + 0.5) * resolution) << ','
       << format_number((c.y + 0.5) * resolution);
    if (i < path.nodes.size()) {
      const PathNode& n = path.nodes[i];
      os << ',' << format_number(n.g) << ',' << format_number(n.h) << ',' << format_number(n.risk) << ','
         << format_number(n.guidance) << ',' << format_number(n.f);
    } else {
      os << ",,,,,";
    }
    os << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const BSplineTrajectory& traj, double sample_dt,
                          const ObjectiveBreakdown& terms) {
  if (!(sample_dt > 0.0)) throw InputError("sample interval must be > 0");
  os << "t,x,y,vx,vy,ax,ay,J_smoothness,J_collision,J_feasibility,J_risk,J_total\n";
  const std::string tail = ',' + format_number(terms.smoothness) + ',' + format_number(terms.collision) + ',' +
                           format_number(terms.feasibility) + ',' + format_number(terms.risk) + ',' +
                           format_number(terms.total);
  const double end = traj.duration();
  const auto count = static_cast<long>(std::floor(end / sample_dt + 1e-9));
  for (long k = 0; k <= count + 1; ++k) {
    double t = static_cast<double>(k) * sample_dt;
    if (k == count + 1) {
      if (end - static_cast<double>(count) * sample_dt <= 1e-9) break;
      t = end;
    }
    t = std::min(t, end);
    const Vec2 p = evaluate(traj, t);
    const Vec2 v = evaluate(traj, t, 1);
    const Vec2 a = evaluate(traj, t, 2);
    os << format_number(t) << ',' << format_number(p.x()) << ',' << format_number(p.y()) << ','
       << format_number(v.x()) << ',' << format_number(v.y()) << ',' << format_number(a.x()) << ','
       << format_number(a.y()) << tail << '\n';
  }
}

void write_trials_csv(std::ostream& os, const std::vector<TrialResult>& trials) {
  os << "seed,pipeline,success,path_length,min_clearance,flight_s,collision_t,replans,reason\n";
  for (const auto& r : trials) {
    os << r.seed << ',' << to_string(r.pipeline) << ',' << (r.success ? 1 : 0) << ','
       << format_number(r.path_length) << ',' << format_number(r.min_clearance) << ','
       << format_number(r.flight_s) << ',' << (r.collision_time ? format_number(*r.collision_time) : "") << ','
       << r.replans << ',' << '"' << r.reason << '"' << '\n';
  }
}

void write_timing_csv(std::ostream& os, const std::vector<TrialResult>& trials) {
  os << "seed,pipeline,planning_ms\n";
  for (const auto& r : trials) {
    os << r.seed << ',' << to_string(r.pipeline) << ',' << format_number(r.planning_ms) << '\n';
  }
}

}  // namespace riskplan
