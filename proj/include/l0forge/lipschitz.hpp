#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "l0forge/types.hpp"

namespace l0forge {

/// Safety margin applied on top of the power-iteration estimate. The
/// thresholds sqrt(2*lambda/(L+mu)) require a true upper bound on
/// lambda_max(A^T A); a slight overestimate is harmless, an underestimate
/// breaks the descent guarantees.
inline constexpr double kLipschitzMargin = 0.01;

/// Smallest admissible L, so the hard-threshold level stays finite for a
/// zero matrix.
inline constexpr double kLipschitzFloor = 1e-12;

/// Power-iteration estimate of lambda_max(A^T A), scaled by (1 + margin).
/// Deterministic for a fixed seed.
inline double estimate_lipschitz(const Matrix& A, int iters = 100,
                                 std::uint64_t seed = 0) {
  if (A.size() == 0) throw std::invalid_argument("estimate_lipschitz: empty matrix");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(A.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  double nv = v.norm();
  if (nv == 0.0) v[0] = nv = 1.0;
  v /= nv;

  double estimate = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector w = A.transpose() * (A * v);
    const double nw = w.norm();
    if (nw <= kLipschitzFloor) {
      estimate = nw;
      break;
    }
    estimate = nw;  // Rayleigh-quotient limit for a unit v
    v = w / nw;
  }
  return std::max(estimate * (1.0 + kLipschitzMargin), kLipschitzFloor);
}

}  // namespace l0forge
