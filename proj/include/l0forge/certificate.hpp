#pragma once

#include <cmath>
#include <limits>

#include "l0forge/objective.hpp"
#include "l0forge/support.hpp"
#include "l0forge/types.hpp"

namespace l0forge {

/// Diagnostic for the local-minimizer conditions at a candidate x:
///   (a) the gradient vanishes on the nonzero coordinates,
///   (b) every nonzero entry clears the hard-threshold level,
///   (c) x is an entrywise fixed point of the thresholded gradient map.
struct CertificateReport {
  double grad_residual = 0.0;     // max |grad_i| over nonzero coordinates
  double magnitude_margin = 0.0;  // min |x_i| over nonzeros, minus the threshold
  bool fixed_point = false;
  bool passed = false;
  double tol = 0.0;
};

inline CertificateReport local_min_certificate(const L0Problem& prob,
                                               const Vector& x,
                                               const Vector& grad,
                                               double tol) {
  CertificateReport report;
  report.tol = tol;

  const double gamma = prob.threshold();
  const double step = 1.0 / (prob.smooth().lipschitz() + prob.mu());

  double grad_residual = 0.0;
  double min_magnitude = std::numeric_limits<double>::infinity();
  bool fixed_point = true;
  for (Index i = 0; i < x.size(); ++i) {
    const double c = x[i] - step * grad[i];
    if (x[i] == 0.0) {
      // zero stays zero iff |c_i| does not exceed the threshold
      if (std::abs(c) > gamma + tol) fixed_point = false;
    } else {
      grad_residual = std::max(grad_residual, std::abs(grad[i]));
      min_magnitude = std::min(min_magnitude, std::abs(x[i]));
      if (std::abs(x[i] - c) > tol || std::abs(c) < gamma - tol)
        fixed_point = false;
    }
  }

  report.grad_residual = grad_residual;
  report.magnitude_margin = min_magnitude - gamma;
  report.fixed_point = fixed_point;
  report.passed = grad_residual <= tol && fixed_point;
  return report;
}

inline CertificateReport local_min_certificate(const L0Problem& prob,
                                               const Vector& x, double tol) {
  return local_min_certificate(prob, x, prob.smooth().gradient(x), tol);
}

}  // namespace l0forge
