#include "riskplan/optimizer.hpp"

#include <cmath>
#include <deque>

#include <Eigen/Dense>

namespace riskplan {
namespace {

using Eigen::VectorXd;

struct Problem {
  const BSplineTrajectory& base;
  const ObjectiveWeights& weights;
  const std::vector<Obstacle>& obstacles;
  const RiskEvaluator& risk;
  FixedEnds fixed;

  std::size_t free_count() const { return base.size() - fixed.head - fixed.tail; }

  VectorXd pack(const BSplineTrajectory& t) const {
    VectorXd x(2 * free_count());
    for (std::size_t i = 0; i < free_count(); ++i) x.segment<2>(2 * i) = t.control_points[fixed.head + i];
    return x;
  }

  BSplineTrajectory unpack(const VectorXd& x) const {
    BSplineTrajectory t = base;
    for (std::size_t i = 0; i < free_count(); ++i) t.control_points[fixed.head + i] = x.segment<2>(2 * i);
    return t;
  }

  double eval(const VectorXd& x, VectorXd& grad, ObjectiveBreakdown* parts = nullptr) const {
    const auto r = total_objective(unpack(x), weights, obstacles, risk, fixed, parts);
    grad.resize(x.size());
    for (std::size_t i = 0; i < free_count(); ++i) grad.segment<2>(2 * i) = r.gradient[fixed.head + i];
    return r.value;
  }
};

}  // namespace

OptimizeResult optimize(const BSplineTrajectory& traj, const ObjectiveWeights& weights,
                        const std::vector<Obstacle>& obstacles, const RiskEvaluator& risk,
                        const OptimizerOptions& opts) {
  validate(traj);
  const auto deg = static_cast<std::size_t>(traj.degree);
  FixedEnds fixed = opts.fixed.value_or(FixedEnds{deg, deg});
  fixed.head = std::min(fixed.head, traj.size());
  fixed.tail = std::min(fixed.tail, traj.size() - fixed.head);
  Problem prob{traj, weights, obstacles, risk, fixed};

  OptimizeResult out{traj, {}};
  VectorXd x = prob.pack(traj);
  VectorXd g;
  double f = prob.eval(x, g, &out.report.final_terms);
  if (!std::isfinite(f) || !g.allFinite()) throw OptimizerError("invalid initial trajectory");
  out.report.objective.push_back(f);
  if (x.size() == 0) {
    out.report.termination = "gradient";
    return out;
  }

  std::deque<std::pair<VectorXd, VectorXd>> history;  // (s, y)
  int stalled = 0;
  out.report.termination = "max_iters";

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.grad_tol) {
      out.report.termination = "gradient";
      break;
    }

    // Two-loop recursion.
    VectorXd d = -g;
    if (!history.empty()) {
      std::vector<double> alpha(history.size());
      for (std::size_t k = history.size(); k-- > 0;) {
        const auto& [s, y] = history[k];
        alpha[k] = s.dot(d) / y.dot(s);
        d -= alpha[k] * y;
      }
      const auto& [s_last, y_last] = history.back();
      d *= s_last.dot(y_last) / y_last.dot(y_last);
      for (std::size_t k = 0; k < history.size(); ++k) {
        const auto& [s, y] = history[k];
        const double beta = y.dot(d) / y.dot(s);
        d += (alpha[k] - beta) * s;
      }
    }

    bool quasi_newton = !history.empty();
    auto steepest = [&] {
      d = -g * (opts.first_step / g.lpNorm<Eigen::Infinity>());
      quasi_newton = false;
    };
    if (!quasi_newton || g.dot(d) >= 0.0 || !d.allFinite()) steepest();

    VectorXd x_new;
    VectorXd g_new;
    double f_new = f;
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double step = 1.0;
      const double slope = g.dot(d);
      for (int bt = 0; bt < opts.max_backtracks; ++bt) {
        x_new = x + step * d;
        f_new = prob.eval(x_new, g_new);
        if (std::isfinite(f_new) && f_new <= f + opts.armijo * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted && quasi_newton) {
        history.clear();
        ++out.report.steepest_fallbacks;
        steepest();
      } else {
        break;
      }
    }
    if (!accepted) {
      out.report.termination = "line_search";
      break;
    }

    const VectorXd s = x_new - x;
    const VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      history.emplace_back(s, y);
      if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
    } else {
      ++out.report.steepest_fallbacks;
      history.clear();
    }

    const double change = f - f_new;
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
    out.report.objective.push_back(f);
    ++out.report.iterations;

    if (change <= opts.stall_tol * std::max(1.0, std::abs(f))) {
      if (++stalled >= opts.stall_iters) {
        out.report.termination = "stall";
        break;
      }
    } else {
      stalled = 0;
    }
  }

  out.traj = prob.unpack(x);
  VectorXd unused;
  prob.eval(x, unused, &out.report.final_terms);
  return out;
}

}  // namespace riskplan
