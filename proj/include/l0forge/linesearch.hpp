#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "l0forge/metric.hpp"
#include "l0forge/objective.hpp"
#include "l0forge/support.hpp"
#include "l0forge/types.hpp"

namespace l0forge {

/// ||Ad||^2 below this multiple of ||d||^2 is treated as the degenerate
/// Qd = 0 branch.
inline constexpr double kDegenerateStepFloor = 1e-14;

struct StepConfig {
  double gamma_bt = 0.5;      // backtracking factor, in (0,1)
  double delta = 0.1;         // acceptance factor, in (0,1)
  int max_backtracks = 60;

  void validate() const {
    if (!(gamma_bt > 0.0 && gamma_bt < 1.0))
      throw std::invalid_argument("StepConfig: gamma_bt must be in (0,1)");
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("StepConfig: delta must be in (0,1)");
    if (max_backtracks < 1)
      throw std::invalid_argument("StepConfig: max_backtracks must be >= 1");
  }
};

struct StepResult {
  double alpha = 0.0;
  Vector trial_point;
  int evaluations = 0;
};

/// Backtracking exhausted without an acceptable step; usually a wrong L or a
/// non-convex objective.
class StepFailureError : public std::runtime_error {
 public:
  StepFailureError(std::string what, double alpha, Vector trial)
      : std::runtime_error(std::move(what)),
        last_alpha(alpha),
        last_trial(std::move(trial)) {}

  double last_alpha;
  Vector last_trial;
};

/// Exact minimizing step of the quadratic along d:
/// alpha = -<grad(x), d> / ||Ad||^2, with alpha = 0 on the degenerate branch.
inline StepResult exact_quadratic_step(const QuadraticObjective& prob,
                                       const Vector& x, const Vector& d) {
  if (!x.allFinite() || !d.allFinite())
    throw std::invalid_argument("exact_quadratic_step: non-finite input");
  StepResult result;
  const Vector Ad = prob.A() * d;
  const double nad2 = Ad.squaredNorm();
  if (nad2 <= kDegenerateStepFloor * d.squaredNorm()) {
    result.trial_point = x;
    return result;
  }
  result.alpha = -prob.gradient(x).dot(d) / nad2;
  result.trial_point = x + result.alpha * d;
  result.evaluations = 1;
  return result;
}

/// Dong's backtracking rule on the support-restricted gradient: starting from
/// alpha0 = 2||g||^2 / (L <g, Hg>) with g = P_s grad(x), shrink by gamma_bt
/// until the new directional derivative has decayed to at most delta times the
/// magnitude of the old one, i.e. <P_s grad(y), d> <= delta |<g, d>|. The
/// bound is reachable from above by any backtracking factor, and for convex f
/// it caps the step at (1+delta) times the exact minimizer, so f decreases.
inline StepResult dong_step(const SmoothObjective& obj, const MetricState& metric,
                            const StepConfig& cfg, const Vector& x,
                            const Vector& d, const SupportSet& s) {
  cfg.validate();
  if (!x.allFinite() || !d.allFinite())
    throw std::invalid_argument("dong_step: non-finite input");

  StepResult result;
  const Vector g = project_support(obj.gradient(x), s);
  ++result.evaluations;
  const double gd = g.dot(d);
  if (gd >= 0.0) {
    // degenerate / non-descent direction: alpha = 0
    result.trial_point = x;
    return result;
  }

  const double gHg = g.dot(apply_metric(metric, g));
  const double alpha0 = 2.0 * g.squaredNorm() / (obj.lipschitz() * gHg);

  double alpha = alpha0;
  Vector y;
  for (int i = 0; i < cfg.max_backtracks; ++i, alpha *= cfg.gamma_bt) {
    y = x + alpha * d;
    const double gyd = project_support(obj.gradient(y), s).dot(d);
    ++result.evaluations;
    if (gyd <= -cfg.delta * gd) {
      result.alpha = alpha;
      result.trial_point = std::move(y);
      return result;
    }
  }
  throw StepFailureError("dong_step: backtracking exhausted", alpha / cfg.gamma_bt,
                         std::move(y));
}

}  // namespace l0forge
