#pragma once

#include <chrono>
#include <cmath>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "l0forge/certificate.hpp"
#include "l0forge/linesearch.hpp"
#include "l0forge/metric.hpp"
#include "l0forge/objective.hpp"
#include "l0forge/support.hpp"
#include "l0forge/threshold.hpp"
#include "l0forge/types.hpp"

namespace l0forge {

enum class Method { VMEPIHT, PIHT, NPIHT, NMAPG, NIAPG };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::VMEPIHT: return "vmepiht";
    case Method::PIHT: return "piht";
    case Method::NPIHT: return "npiht";
    case Method::NMAPG: return "nmapg";
    case Method::NIAPG: return "niapg";
  }
  return "unknown";
}

inline Method parse_method(const std::string& name) {
  if (name == "vmepiht") return Method::VMEPIHT;
  if (name == "piht") return Method::PIHT;
  if (name == "npiht") return Method::NPIHT;
  if (name == "nmapg") return Method::NMAPG;
  if (name == "niapg") return Method::NIAPG;
  throw std::invalid_argument(
      "unknown method '" + name +
      "'; valid methods: vmepiht, piht, npiht, nmapg, niapg");
}

inline const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {
      Method::VMEPIHT, Method::PIHT, Method::NPIHT, Method::NMAPG,
      Method::NIAPG};
  return methods;
}

struct SolveOptions {
  double tol = 1e-5;
  long max_iters = 1000;

  double omega = 0.9999;   // nPIHT extrapolation weight
  double eta = 0.1;        // nmAPG averaging factor
  double delta_nm = 1e-4;  // nmAPG non-monotone acceptance coefficient
  int q_window = 2;        // niAPG objective window length

  int metric_capacity = 6;
  double metric_damping = 1e-6;
  std::optional<long> freeze_after;  // defaults to 50 for non-quadratic f
  StepConfig step;

  int trace_level = 1;  // >= 2 stores full iterates

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("SolveOptions: tol must be > 0");
    if (max_iters < 1) throw std::invalid_argument("SolveOptions: max_iters must be >= 1");
    if (q_window < 1) throw std::invalid_argument("SolveOptions: q_window must be >= 1");
    step.validate();
  }
};

struct RunRecord {
  std::string method;
  long iterations = 0;
  double wall_time_s = 0.0;
  std::vector<double> objective;       // H(x_k) per iteration
  std::vector<Vector> iterates;        // x_k, trace_level >= 2
  std::vector<Vector> extrapolations;  // y_k, trace_level >= 2 (vmepiht)
  SupportSet final_support;
  CertificateReport certificate;
  std::string stop_reason;  // "converged" | "max_iters"
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shared stopping rule: ||x_next - a|| / max{1, ||x||} < tol.
inline bool check_stop(const Vector& x_next, const Vector& a, const Vector& x,
                       double tol) {
  if (x_next.size() != a.size())
    throw std::invalid_argument("check_stop: dimension mismatch");
  return (x_next - a).norm() / std::max(1.0, x.norm()) < tol;
}

/// nmAPG averaging recursion: q' = eta*q + 1, c' = (eta*q*c + H_next) / q'.
inline std::pair<double, double> nmapg_qc_update(double q, double c, double eta,
                                                 double objective_next) {
  const double q_next = eta * q + 1.0;
  return {q_next, (eta * q * c + objective_next) / q_next};
}

/// niAPG reference value: max of the retained objective window.
inline double niapg_window_max(const std::deque<double>& window) {
  if (window.empty()) throw std::invalid_argument("niapg_window_max: empty window");
  double best = window.front();
  for (double v : window) best = std::max(best, v);
  return best;
}

/// nPIHT extrapolation, masked so zero coordinates receive no momentum:
/// y_i = x_i + |sign(x_i)| * omega * (x_i - x_prev_i).
inline Vector npiht_extrapolate(const Vector& x, const Vector& x_prev,
                                double omega) {
  Vector y = x;
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) y[i] += omega * (x[i] - x_prev[i]);
  return y;
}

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

inline double record_objective(const L0Problem& prob, const Vector& x,
                               RunRecord& rec) {
  const double h = prob.objective(x);
  if (!std::isfinite(h)) throw DivergenceError("solver diverged: non-finite objective");
  rec.objective.push_back(h);
  return h;
}

inline void finalize(const L0Problem& prob, const Vector& x, const Vector& grad,
                     double tol, const Stopwatch& timer, RunRecord& rec) {
  rec.final_support = support_of(x, 0.0);
  rec.certificate = local_min_certificate(prob, x, grad, tol);
  rec.wall_time_s = timer.seconds();
}

}  // namespace detail

/// Variable-metric extrapolation PIHT: a hard-threshold step fixes the
/// candidate support, then a quasi-Newton step restricted to that support
/// decreases f. Quadratic objectives use the exact minimizing step length;
/// general objectives use Dong's backtracking rule with an eventually-frozen
/// metric.
inline std::pair<Vector, RunRecord> solve_vmepiht(const L0Problem& prob,
                                                  const Vector& x0,
                                                  const SolveOptions& opts) {
  opts.validate();
  if (!x0.allFinite()) throw std::invalid_argument("solve_vmepiht: non-finite x0");
  detail::Stopwatch timer;

  const auto* quad = dynamic_cast<const QuadraticObjective*>(&prob.smooth());
  std::optional<long> freeze_after = opts.freeze_after;
  if (!quad && !freeze_after) freeze_after = 50;
  MetricState metric(opts.metric_capacity, opts.metric_damping, freeze_after);
  const double damping = opts.metric_damping;

  RunRecord rec;
  rec.method = method_name(Method::VMEPIHT);
  rec.stop_reason = "max_iters";

  Vector y = x0;
  Vector x_prev = x0;
  Vector grad_y = prob.smooth().gradient(y);
  Vector grad_x_prev = grad_y;
  Vector x = x0;
  Vector grad_x = grad_y;

  for (long k = 0; k < opts.max_iters; ++k) {
    x = piht_step(prob, y, grad_y);
    detail::record_objective(prob, x, rec);
    if (opts.trace_level >= 2) {
      rec.iterates.push_back(x);
      rec.extrapolations.push_back(y);
    }
    grad_x = prob.smooth().gradient(x);
    rec.iterations = k + 1;

    // memory pairs, in chronological order: the extrapolation displacement of
    // the previous pass, then this pass's proximal displacement
    if (!metric.frozen()) {
      if (k > 0) {
        const Vector s1 = y - x_prev;
        metric = push_pair(metric, s1, grad_y - grad_x_prev + damping * s1);
      }
      const Vector s2 = x - y;
      metric = push_pair(metric, s2, grad_x - grad_y + damping * s2);
    }
    metric = maybe_freeze(metric, k + 1);

    const SupportSet support = support_of(x, 0.0);
    const Vector d = restricted_direction(metric, grad_x, support);
    const StepResult step =
        quad ? exact_quadratic_step(*quad, x, d)
             : dong_step(prob.smooth(), metric, opts.step, x, d, support);
    const Vector& y_next = step.trial_point;

    if (check_stop(x, y_next, x, opts.tol) ||
        local_min_certificate(prob, x, grad_x, opts.tol).passed) {
      rec.stop_reason = "converged";
      break;
    }

    x_prev = x;
    grad_x_prev = grad_x;
    y = y_next;
    grad_y = prob.smooth().gradient(y);
  }

  detail::finalize(prob, x, grad_x, opts.tol, timer, rec);
  return {x, rec};
}

/// Plain proximal iterative hard thresholding: x_{k+1} = piht_step(x_k).
inline std::pair<Vector, RunRecord> solve_piht(const L0Problem& prob,
                                               const Vector& x0,
                                               const SolveOptions& opts) {
  opts.validate();
  if (!x0.allFinite()) throw std::invalid_argument("solve_piht: non-finite x0");
  detail::Stopwatch timer;

  RunRecord rec;
  rec.method = method_name(Method::PIHT);
  rec.stop_reason = "max_iters";

  Vector x = x0;
  Vector grad = prob.smooth().gradient(x);
  for (long k = 0; k < opts.max_iters; ++k) {
    const Vector x_next = piht_step(prob, x, grad);
    detail::record_objective(prob, x_next, rec);
    if (opts.trace_level >= 2) rec.iterates.push_back(x_next);
    rec.iterations = k + 1;
    const bool done = check_stop(x_next, x, x, opts.tol);
    x = x_next;
    grad = prob.smooth().gradient(x);
    if (done) {
      rec.stop_reason = "converged";
      break;
    }
  }

  detail::finalize(prob, x, grad, opts.tol, timer, rec);
  return {x, rec};
}

/// PIHT with support-masked extrapolation and a gradient-angle reset.
inline std::pair<Vector, RunRecord> solve_npiht(const L0Problem& prob,
                                                const Vector& x0,
                                                const SolveOptions& opts) {
  opts.validate();
  if (!x0.allFinite()) throw std::invalid_argument("solve_npiht: non-finite x0");
  detail::Stopwatch timer;

  RunRecord rec;
  rec.method = method_name(Method::NPIHT);
  rec.stop_reason = "max_iters";

  Vector x = x0;
  Vector x_prev = x0;
  Vector grad = prob.smooth().gradient(x);

  for (long k = 0; k < opts.max_iters; ++k) {
    Vector y = npiht_extrapolate(x, x_prev, opts.omega);
    Vector grad_y = (y - x).isZero(0.0) ? grad : prob.smooth().gradient(y);
    if ((y - x).dot(grad_y) > 0.0) {
      y = x;
      grad_y = grad;
    }
    const Vector x_next = piht_step(prob, y, grad_y);
    detail::record_objective(prob, x_next, rec);
    if (opts.trace_level >= 2) rec.iterates.push_back(x_next);
    rec.iterations = k + 1;
    const bool done = check_stop(x_next, y, x, opts.tol);
    x_prev = x;
    x = x_next;
    grad = prob.smooth().gradient(x);
    if (done) {
      rec.stop_reason = "converged";
      break;
    }
  }

  detail::finalize(prob, x, grad, opts.tol, timer, rec);
  return {x, rec};
}

/// Monotone APG with the non-monotone shortcut: the extrapolated proximal
/// point is accepted outright when its objective clears the running average
/// c_k, and the monotone two-prox comparison is the fallback.
inline std::pair<Vector, RunRecord> solve_nmapg(const L0Problem& prob,
                                                const Vector& x0,
                                                const SolveOptions& opts) {
  opts.validate();
  if (!x0.allFinite()) throw std::invalid_argument("solve_nmapg: non-finite x0");
  detail::Stopwatch timer;

  RunRecord rec;
  rec.method = method_name(Method::NMAPG);
  rec.stop_reason = "max_iters";

  const double alpha = 1.0 / (prob.smooth().lipschitz() + prob.mu());
  const double gamma = std::sqrt(2.0 * prob.lambda() * alpha);

  Vector x = x0;
  Vector x_prev = x0;
  Vector z = x0;
  double t_prev = 0.0;
  double t = 1.0;
  double q = 1.0;
  double c = prob.objective(x0);
  Vector grad = prob.smooth().gradient(x);

  for (long k = 0; k < opts.max_iters; ++k) {
    const Vector y =
        x + (t_prev / t) * (z - x) + ((t_prev - 1.0) / t) * (x - x_prev);
    const Vector grad_y = prob.smooth().gradient(y);
    const Vector z_next = hard_threshold(y - alpha * grad_y, gamma);
    const double h_z = prob.objective(z_next);

    Vector x_next;
    double h_next;
    if (h_z <= c - opts.delta_nm * (z_next - y).squaredNorm()) {
      x_next = z_next;
      h_next = h_z;
    } else {
      const Vector v = hard_threshold(x - alpha * grad, gamma);
      const double h_v = prob.objective(v);
      if (h_z <= h_v) {
        x_next = z_next;
        h_next = h_z;
      } else {
        x_next = v;
        h_next = h_v;
      }
    }
    if (!std::isfinite(h_next))
      throw DivergenceError("solver diverged: non-finite objective");
    rec.objective.push_back(h_next);
    if (opts.trace_level >= 2) rec.iterates.push_back(x_next);
    rec.iterations = k + 1;

    std::tie(q, c) = nmapg_qc_update(q, c, opts.eta, h_next);
    const double t_next = (std::sqrt(1.0 + 4.0 * t * t) + 1.0) / 2.0;

    const bool done = check_stop(x_next, x, x, opts.tol);
    x_prev = x;
    x = x_next;
    z = z_next;
    t_prev = t;
    t = t_next;
    grad = prob.smooth().gradient(x);
    if (done) {
      rec.stop_reason = "converged";
      break;
    }
  }

  detail::finalize(prob, x, grad, opts.tol, timer, rec);
  return {x, rec};
}

/// Accelerated proximal gradient with one proximal step per iteration and a
/// non-monotone window test on the extrapolated point.
inline std::pair<Vector, RunRecord> solve_niapg(const L0Problem& prob,
                                                const Vector& x0,
                                                const SolveOptions& opts) {
  opts.validate();
  if (!x0.allFinite()) throw std::invalid_argument("solve_niapg: non-finite x0");
  detail::Stopwatch timer;

  RunRecord rec;
  rec.method = method_name(Method::NIAPG);
  rec.stop_reason = "max_iters";

  const double step = 1.0 / (prob.smooth().lipschitz() + prob.mu());
  const double gamma = std::sqrt(2.0 * prob.lambda() * step);

  Vector x = x0;
  Vector x_prev = x0;
  std::deque<double> window = {prob.objective(x0)};
  Vector grad = prob.smooth().gradient(x);

  for (long k = 1; k <= opts.max_iters; ++k) {
    const double weight = static_cast<double>(k - 1) / static_cast<double>(k);
    const Vector y = x + weight * (x - x_prev);
    const double delta = niapg_window_max(window);

    const bool take_y = !(y - x).isZero(0.0) && prob.objective(y) <= delta;
    const Vector& v = take_y ? y : x;
    const Vector grad_v = take_y ? prob.smooth().gradient(y) : grad;

    const Vector x_next = hard_threshold(v - step * grad_v, gamma);
    const double h_next = detail::record_objective(prob, x_next, rec);
    if (opts.trace_level >= 2) rec.iterates.push_back(x_next);
    rec.iterations = k;

    window.push_back(h_next);
    while (static_cast<int>(window.size()) > opts.q_window + 1)
      window.pop_front();

    const bool done = check_stop(x_next, v, x, opts.tol);
    x_prev = x;
    x = x_next;
    grad = prob.smooth().gradient(x);
    if (done) {
      rec.stop_reason = "converged";
      break;
    }
  }

  detail::finalize(prob, x, grad, opts.tol, timer, rec);
  return {x, rec};
}

inline std::pair<Vector, RunRecord> solve(const L0Problem& prob, const Vector& x0,
                                          Method method,
                                          const SolveOptions& opts) {
  switch (method) {
    case Method::VMEPIHT: return solve_vmepiht(prob, x0, opts);
    case Method::PIHT: return solve_piht(prob, x0, opts);
    case Method::NPIHT: return solve_npiht(prob, x0, opts);
    case Method::NMAPG: return solve_nmapg(prob, x0, opts);
    case Method::NIAPG: return solve_niapg(prob, x0, opts);
  }
  throw std::invalid_argument("solve: unknown method");
}

}  // namespace l0forge
