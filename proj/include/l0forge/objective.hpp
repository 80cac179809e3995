#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "l0forge/lipschitz.hpp"
#include "l0forge/types.hpp"

namespace l0forge {

/// Convex differentiable f with an L-Lipschitz gradient.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;

  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual double lipschitz() const = 0;
  virtual Index dimension() const = 0;
};

/// f(x) = ||Ax - b||^2 / 2 with cached A^T b and Lipschitz constant
/// L = lambda_max(A^T A).
class QuadraticObjective final : public SmoothObjective {
 public:
  QuadraticObjective(Matrix A, Vector b)
      : QuadraticObjective(std::move(A), std::move(b), 0.0) {
    lip_ = estimate_lipschitz(A_);
  }

  QuadraticObjective(Matrix A, Vector b, double lipschitz_bound)
      : A_(std::move(A)), b_(std::move(b)), lip_(lipschitz_bound) {
    if (A_.rows() != b_.size())
      throw std::invalid_argument("QuadraticObjective: A rows must match b size");
    Atb_ = A_.transpose() * b_;
  }

  double value(const Vector& x) const override {
    return 0.5 * (A_ * x - b_).squaredNorm();
  }

  // A^T(Ax) - A^T b with the cached A^T b; one matrix pass per factor.
  Vector gradient(const Vector& x) const override {
    return A_.transpose() * (A_ * x) - Atb_;
  }

  double lipschitz() const override { return lip_; }
  Index dimension() const override { return A_.cols(); }

  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Vector& Atb() const { return Atb_; }

  /// A^T A v without forming A^T A.
  Vector normal_product(const Vector& v) const {
    return A_.transpose() * (A_ * v);
  }

 private:
  Matrix A_;
  Vector b_;
  Vector Atb_;
  double lip_;
};

/// min_x f(x) + lambda ||x||_0, with the proximal damping mu.
class L0Problem {
 public:
  L0Problem(const SmoothObjective& smooth, double lambda, double mu = 1e-6)
      : smooth_(&smooth), lambda_(lambda), mu_(mu) {
    if (!(lambda > 0.0)) throw std::invalid_argument("L0Problem: lambda must be > 0");
    if (!(mu > 0.0)) throw std::invalid_argument("L0Problem: mu must be > 0");
    if (!std::isfinite(threshold()))
      throw std::invalid_argument("L0Problem: non-finite threshold");
  }

  const SmoothObjective& smooth() const { return *smooth_; }
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

  /// Hard-threshold level sqrt(2*lambda / (L + mu)).
  double threshold() const {
    return std::sqrt(2.0 * lambda_ / (smooth_->lipschitz() + mu_));
  }

  /// H(x) = f(x) + lambda * ||x||_0 (exact-zero count).
  double objective(const Vector& x) const {
    Index nnz = 0;
    for (Index i = 0; i < x.size(); ++i)
      if (x[i] != 0.0) ++nnz;
    return smooth_->value(x) + lambda_ * static_cast<double>(nnz);
  }

 private:
  const SmoothObjective* smooth_;
  double lambda_;
  double mu_;
};

}  // namespace l0forge
