#pragma once

#include <cmath>
#include <stdexcept>

#include "l0forge/objective.hpp"
#include "l0forge/types.hpp"

namespace l0forge {

/// Componentwise hard thresholding: keeps entries with |c_i| > gamma and
/// zeroes the rest. The tie |c_i| = gamma resolves to 0, so the map is a
/// function rather than set-valued.
inline Vector hard_threshold(const Vector& c, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("hard_threshold: gamma must be > 0");
  if (!c.allFinite()) throw std::invalid_argument("hard_threshold: non-finite input");
  Vector out(c.size());
  for (Index i = 0; i < c.size(); ++i)
    out[i] = std::abs(c[i]) > gamma ? c[i] : 0.0;
  return out;
}

/// Proximal hard-thresholding step with a precomputed gradient at y:
/// hard_threshold(y - grad/(L+mu), sqrt(2*lambda/(L+mu))).
inline Vector piht_step(const L0Problem& prob, const Vector& y,
                        const Vector& grad_y) {
  const double step = 1.0 / (prob.smooth().lipschitz() + prob.mu());
  return hard_threshold(y - step * grad_y, prob.threshold());
}

inline Vector piht_step(const L0Problem& prob, const Vector& y) {
  if (!y.allFinite()) throw std::invalid_argument("piht_step: non-finite input");
  return piht_step(prob, y, prob.smooth().gradient(y));
}

}  // namespace l0forge
