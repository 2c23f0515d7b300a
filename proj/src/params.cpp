#include "riskplan/params.hpp"

#include <algorithm>
#include <cmath>

#include "riskplan/types.hpp"

namespace riskplan {
namespace {

struct Field {
  const char* key;
  double PlannerParams::*num = nullptr;
  bool PlannerParams::*flag = nullptr;
};

// Sorted by key so that serialization order matches the canonical form.
constexpr Field kFields[] = {
    {"C", &PlannerParams::C},
    {"a_m", &PlannerParams::a_m},
    {"alpha", &PlannerParams::alpha},
    {"backward_prediction", nullptr, &PlannerParams::backward_prediction},
    {"dt", &PlannerParams::dt},
    {"epsilon", &PlannerParams::epsilon},
    {"k1", &PlannerParams::k1},
    {"lambda", &PlannerParams::lambda},
    {"lambda_c", &PlannerParams::lambda_c},
    {"lambda_d", &PlannerParams::lambda_d},
    {"lambda_r", &PlannerParams::lambda_r},
    {"lambda_s", &PlannerParams::lambda_s},
    {"literal_dynamic_gradient", nullptr, &PlannerParams::literal_dynamic_gradient},
    {"n_ref", &PlannerParams::n_ref},
    {"r_d", &PlannerParams::r_d},
    {"r_thresh", &PlannerParams::r_thresh},
    {"rho_dyn", &PlannerParams::rho_dyn},
    {"s_f", &PlannerParams::s_f},
    {"v_m", &PlannerParams::v_m},
};

void require(bool ok, const std::string& what) {
  if (!ok) throw InvariantError("invariant violated: " + what);
}

}  // namespace

void validate(const PlannerParams& p) {
  for (const auto& f : kFields) {
    if (f.num != nullptr) require(std::isfinite(p.*f.num), std::string("params.") + f.key + " finite");
  }
  require(p.lambda >= 0.0, "params.lambda >= 0");
  require(p.alpha >= 0.0, "params.alpha >= 0");
  require(p.epsilon > 0.0 && p.epsilon <= 1e-3, "0 < params.epsilon <= 1e-3");
  require(p.n_ref > 0.0, "params.n_ref > 0");
  require(p.rho_dyn > 0.0, "params.rho_dyn > 0");
  require(p.k1 > 0.0, "params.k1 > 0");
  require(p.r_thresh > 0.0, "params.r_thresh > 0");
  require(p.r_d > 0.0, "params.r_d > 0");
  require(p.s_f > 0.0, "params.s_f > 0");
  require(p.v_m > 0.0, "params.v_m > 0");
  require(p.a_m > 0.0, "params.a_m > 0");
  require(p.dt > 0.0, "params.dt > 0");
  require(p.C > 0.0, "params.C > 0");
  require(p.lambda_s >= 0.0, "params.lambda_s >= 0");
  require(p.lambda_c >= 0.0, "params.lambda_c >= 0");
  require(p.lambda_d >= 0.0, "params.lambda_d >= 0");
  require(p.lambda_r >= 0.0, "params.lambda_r >= 0");
}

bool set_param(PlannerParams& p, const std::string& key, double value) {
  const auto* it = std::find_if(std::begin(kFields), std::end(kFields),
                                [&](const Field& f) { return key == f.key; });
  if (it == std::end(kFields)) return false;
  if (it->num != nullptr) {
    p.*(it->num) = value;
  } else {
    p.*(it->flag) = value != 0.0;
  }
  return true;
}

bool is_flag_param(const std::string& key) {
  return std::any_of(std::begin(kFields), std::end(kFields),
                     [&](const Field& f) { return key == f.key && f.flag != nullptr; });
}

std::vector<std::pair<std::string, double>> param_entries(const PlannerParams& p) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& f : kFields) {
    out.emplace_back(f.key, f.num != nullptr ? p.*(f.num) : (p.*(f.flag) ? 1.0 : 0.0));
  }
  return out;
}

}  // namespace riskplan
