#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "l0forge/objective.hpp"
#include "l0forge/support.hpp"
#include "l0forge/types.hpp"

namespace l0forge {

/// Exhaustive enumeration is limited to 2^14 support patterns.
inline constexpr Index kMaxOracleDimension = 14;

/// Restricted normal equations switch to the pseudo-inverse at this
/// condition number.
inline constexpr double kOracleConditionLimit = 1e12;

struct MinimizerCandidate {
  std::uint32_t support_mask = 0;  // bit i set <=> coordinate i may be nonzero
  Vector point;
  double objective = 0.0;  // H(point)
  bool is_local = false;
  bool degenerate = false;  // rank-deficient restricted block, min-norm solution
};

namespace detail {

inline void require_oracle_size(Index n) {
  if (n > kMaxOracleDimension)
    throw std::invalid_argument("oracle: dimension exceeds the 2^14 enumeration limit");
}

/// Least-squares solve of min ||A_P z - b||^2 over the masked columns.
/// Falls back to the minimum-norm SVD solution on ill-conditioned blocks.
inline Vector restricted_least_squares(const Matrix& A, const Vector& b,
                                       const std::vector<Index>& cols,
                                       bool& degenerate) {
  Matrix Ap(A.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) Ap.col(j) = A.col(cols[j]);

  Eigen::JacobiSVD<Matrix> svd(Ap, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  // a wide block (more columns than rows) is rank deficient by construction
  degenerate = sv.size() < Ap.cols() || sv(0) <= 0.0 ||
               sv(sv.size() - 1) * kOracleConditionLimit < sv(0);
  if (!degenerate) {
    const Matrix Q = Ap.transpose() * Ap;
    const Vector rhs = Ap.transpose() * b;
    return Q.ldlt().solve(rhs);
  }
  return svd.solve(b);
}

}  // namespace detail

/// Solves the restricted least-squares problem on every support pattern and
/// classifies each candidate. A candidate is local when the gradient vanishes
/// on its support and its zero pattern matches the pattern exactly; the
/// global minimizer is the H-argmin over local candidates.
inline std::vector<MinimizerCandidate> enumerate_minimizers(
    const L0Problem& prob) {
  const auto* quad = dynamic_cast<const QuadraticObjective*>(&prob.smooth());
  if (quad == nullptr)
    throw std::invalid_argument("enumerate_minimizers: quadratic objective required");
  const Index n = quad->dimension();
  detail::require_oracle_size(n);

  const Matrix& A = quad->A();
  const Vector& b = quad->b();

  std::vector<MinimizerCandidate> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    MinimizerCandidate cand;
    cand.support_mask = mask;
    cand.point = Vector::Zero(n);

    std::vector<Index> cols;
    for (Index i = 0; i < n; ++i)
      if (mask & (std::uint32_t{1} << i)) cols.push_back(i);

    if (!cols.empty()) {
      const Vector z =
          detail::restricted_least_squares(A, b, cols, cand.degenerate);
      for (std::size_t j = 0; j < cols.size(); ++j) cand.point[cols[j]] = z[j];
    }
    cand.objective = prob.objective(cand.point);

    const Vector grad = quad->gradient(cand.point);
    double resid = 0.0;
    bool pattern_matches = true;
    for (Index i : cols) {
      resid = std::max(resid, std::abs(grad[i]));
      if (cand.point[i] == 0.0) pattern_matches = false;
    }
    const double scale = std::max(1.0, quad->Atb().lpNorm<Eigen::Infinity>());
    cand.is_local = pattern_matches && resid <= 1e-8 * scale;
    out.push_back(std::move(cand));
  }
  return out;
}

/// Index into the enumeration of the global minimizer of H.
inline std::size_t global_minimizer_index(
    const std::vector<MinimizerCandidate>& candidates) {
  std::size_t best = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].is_local) continue;
    if (best == candidates.size() ||
        candidates[i].objective < candidates[best].objective)
      best = i;
  }
  if (best == candidates.size())
    throw std::runtime_error("global_minimizer_index: no local minimizer found");
  return best;
}

/// Euclidean distance from x to the nearest enumerated local minimizer.
inline double distance_to_local_minimizer(
    const std::vector<MinimizerCandidate>& candidates, const Vector& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& cand : candidates)
    if (cand.is_local) best = std::min(best, (cand.point - x).norm());
  return best;
}

/// Value of the proximal subproblem
/// lambda*||x||_0 + (L/2)||x - y + grad f(y)/L||^2 + (mu/2)||x - y||^2.
inline double prox_objective(const L0Problem& prob, const Vector& y,
                             const Vector& x) {
  const double L = prob.smooth().lipschitz();
  const Vector c = y - prob.smooth().gradient(y) / L;
  Index nnz = 0;
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) ++nnz;
  return prob.lambda() * static_cast<double>(nnz) +
         0.5 * L * (x - c).squaredNorm() + 0.5 * prob.mu() * (x - y).squaredNorm();
}

/// Exact minimizer of the proximal subproblem by direct minimization over all
/// support patterns; independent check of the hard-threshold step.
inline Vector prox_bruteforce(const L0Problem& prob, const Vector& y) {
  const Index n = y.size();
  detail::require_oracle_size(n);

  const double L = prob.smooth().lipschitz();
  const double mu = prob.mu();
  const Vector c = y - prob.smooth().gradient(y) / L;

  Vector best;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    Vector x = Vector::Zero(n);
    for (Index i = 0; i < n; ++i)
      if (mask & (std::uint32_t{1} << i))
        x[i] = (L * c[i] + mu * y[i]) / (L + mu);
    const double value = prox_objective(prob, y, x);
    if (value < best_value) {
      best_value = value;
      best = std::move(x);
    }
  }
  return best;
}

}  // namespace l0forge
